"""The blackboard and its tick loop.

Agents are scheduled by integer periods (an agent acts when tick mod period
is 0, so period 1 means every tick). Active agents read one immutable
snapshot, their raw deltas are clamped to each agent's step bound, summed,
clamped to joint limits, and guarded against collision before the shared
configuration is updated. Every tick is recorded.
"""

import hashlib
import math
from dataclasses import dataclass, field, replace

import numpy as np

from coplan import agents as agents_mod
from coplan import geometry, kinematics

RUNNING = "Running"
PAUSED = "Paused"
SUCCEEDED = "Succeeded"
FAILED_MAX_TICKS = "FailedMaxTicks"
FAILED_STALL = "FailedStall"

TERMINAL = (SUCCEEDED, FAILED_MAX_TICKS, FAILED_STALL)

GUARD_HARD = "hard"
GUARD_OFF = "off"

STEP_BOUND_SLACK = 1e-12


class EngineError(ValueError):
    pass


@dataclass
class AgentSpec:
    id: str
    kind: str
    params: object
    period: int
    step_bound: float
    enabled: bool = True

    def __post_init__(self):
        if self.kind not in agents_mod.KINDS:
            raise EngineError(f"unknown agent kind {self.kind!r}")
        if not (isinstance(self.period, int) and self.period >= 1):
            raise EngineError(f"agent {self.id}: period must be an integer >= 1")
        if not self.step_bound > 0.0:
            raise EngineError(f"agent {self.id}: step bound must be > 0")


@dataclass(frozen=True)
class EngineConfig:
    max_ticks: int = 1000
    collision_guard: str = GUARD_HARD
    self_collision_guard: bool = False
    stall_window: int = 50
    stall_threshold: float = 1e-3

    def __post_init__(self):
        if not self.max_ticks >= 1:
            raise EngineError("max_ticks must be >= 1")
        if self.collision_guard not in (GUARD_HARD, GUARD_OFF):
            raise EngineError("collision_guard must be 'hard' or 'off'")
        if not self.stall_window >= 1:
            raise EngineError("stall window must be >= 1")
        if not self.stall_threshold >= 0.0:
            raise EngineError("stall threshold must be >= 0")


@dataclass(frozen=True)
class SetAgent:
    """Mid-run agent reconfiguration (operator control command)."""

    agent_id: str
    period: int | None = None
    step_bound: float | None = None
    enabled: bool | None = None


@dataclass(frozen=True)
class ScriptEntry:
    """A command injected when the engine sits at the given tick."""

    tick: int
    command: object


@dataclass
class TickRecord:
    tick: int
    active: tuple
    deltas: dict                 # agent id -> tuple of floats (post-clamp)
    summed: tuple
    applied: bool
    q: tuple
    goal_distance: float
    min_clearance: float | None  # None when the scene has no obstacles
    line_of_sight: bool
    events: tuple


@dataclass
class Trace:
    seed: int
    q0: tuple
    status: str
    records: list
    scenario_hash: str | None = None
    scenario: dict | None = None   # canonical scenario, embedded for replay


def active_agents(tick: int, specs) -> list:
    """Ids of agents that act at this tick, in declaration order."""
    if tick < 1:
        raise EngineError("agents first act at tick 1")
    return [s.id for s in specs if s.enabled and tick % s.period == 0]


def normalize(raw, bound: float):
    """Clamp a raw delta to the step bound (scale down only; zero stays zero)."""
    if not bound > 0.0:
        raise EngineError("step bound must be > 0")
    raw = np.asarray(raw, dtype=float)
    if not np.all(np.isfinite(raw)):
        raise EngineError("non-finite contribution")
    n = float(np.linalg.norm(raw))
    if n <= bound:
        return raw
    return raw * (bound / n)


def _agent_substream(seed: int, agent_id: str):
    digest = hashlib.sha256(agent_id.encode()).digest()
    key = int.from_bytes(digest[:8], "little")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, key])))


class Engine:
    """One blackboard run: shared configuration plus the tick loop."""

    def __init__(self, model, scene, specs, config, seed, q0, script=()):
        ids = [s.id for s in specs]
        if len(set(ids)) != len(ids):
            raise EngineError("agent ids must be unique")
        goal_frame = scene.goal.frame
        if goal_frame not in model.frame_ids:
            raise EngineError(f"goal frame {goal_frame!r} not defined by the model")
        self.model = model
        self.scene = scene
        self.specs = [replace(s) for s in specs]
        self.config = config
        self.seed = int(seed)
        self.script = sorted(script, key=lambda e: e.tick)
        self._script_pos = 0
        self.operator_queue = agents_mod.OperatorQueue()
        self._rngs = {s.id: _agent_substream(self.seed, s.id) for s in self.specs}
        self.tick = 0
        self.q = model.limits.clamp(np.asarray(q0, dtype=float))
        if self.q.shape != (model.dim,):
            raise EngineError("initial configuration dimension mismatch")
        self.status = RUNNING
        self.q0 = tuple(float(v) for v in self.q)
        self.records = []
        self._refresh_state()
        self._best_distance = self.goal_distance
        self._last_best_tick = 0

    # -- state derived from q -------------------------------------------------

    def _refresh_state(self):
        self.body = kinematics.forward_kinematics(self.model, self.q)
        self.clearance = geometry.clearance(self.body.shapes, self.scene)
        fx, fy = self.body.frames[self.scene.goal.frame]
        gx, gy = self.scene.goal.point
        self.goal_distance = math.hypot(gx - fx, gy - fy)
        self.los = geometry.line_of_sight((fx, fy), (gx, gy), self.scene)

    @property
    def stalled(self) -> bool:
        return (self.tick - self._last_best_tick) >= self.config.stall_window

    def snapshot(self) -> agents_mod.Snapshot:
        return agents_mod.Snapshot(
            tick=self.tick,
            q=self.q.copy(),
            model=self.model,
            scene=self.scene,
            body=self.body,
            clearance=self.clearance,
            goal_distance=self.goal_distance,
            stalled=self.stalled,
        )

    def spec_by_id(self, agent_id):
        for s in self.specs:
            if s.id == agent_id:
                return s
        return None

    def apply_set_agent(self, cmd: SetAgent):
        """Validate and apply a SetAgent change. Returns an error string or None."""
        spec = self.spec_by_id(cmd.agent_id)
        if spec is None:
            return f"unknown agent id {cmd.agent_id!r}"
        if cmd.period is not None and not (isinstance(cmd.period, int) and cmd.period >= 1):
            return "period must be an integer >= 1"
        if cmd.step_bound is not None and not cmd.step_bound > 0:
            return "step_bound must be > 0"
        if cmd.period is not None:
            spec.period = cmd.period
        if cmd.step_bound is not None:
            spec.step_bound = float(cmd.step_bound)
        if cmd.enabled is not None:
            spec.enabled = bool(cmd.enabled)
        return None

    def _inject_script(self, events):
        while self._script_pos < len(self.script) and self.script[self._script_pos].tick <= self.tick:
            entry = self.script[self._script_pos]
            self._script_pos += 1
            cmd = entry.command
            if isinstance(cmd, SetAgent):
                err = self.apply_set_agent(cmd)
                if err is not None:
                    events.append({"kind": "error", "detail": f"script set_agent: {err}"})
            else:
                self.operator_queue.push(cmd)

    # -- the tick -------------------------------------------------------------

    def step(self) -> TickRecord:
        if self.status in TERMINAL:
            raise EngineError(f"cannot tick: status is {self.status}")
        t = self.tick + 1
        events = []
        self._inject_script(events)
        snap = self.snapshot()
        active = active_agents(t, self.specs)
        deltas = {}
        summed = np.zeros(self.model.dim)
        for spec in self.specs:
            if spec.id not in active:
                continue
            try:
                raw, agent_events = agents_mod.contribute(
                    spec.kind, spec.params, snap,
                    rng=self._rngs[spec.id], queue=self.operator_queue,
                )
                for ev in agent_events:
                    events.append({"agent": spec.id, **ev})
                delta = normalize(raw, spec.step_bound)
            except (EngineError, ValueError) as exc:
                events.append({"agent": spec.id, "kind": "nonfinite", "detail": str(exc)})
                delta = np.zeros(self.model.dim)
            deltas[spec.id] = tuple(float(v) for v in delta)
            summed += delta
        candidate = self.model.limits.clamp(self.q + summed)
        applied = True
        if self.config.collision_guard == GUARD_HARD or self.config.self_collision_guard:
            cand_body = kinematics.forward_kinematics(self.model, candidate)
            if self.config.collision_guard == GUARD_HARD:
                rep = geometry.clearance(cand_body.shapes, self.scene)
                if rep.obstacle_index >= 0 and rep.min_distance < 0.0:
                    applied = False
                    events.append({"kind": "blocked", "detail": "collision guard"})
            if applied and self.config.self_collision_guard:
                if kinematics.self_clearance(self.model, cand_body) < 0.0:
                    applied = False
                    events.append({"kind": "blocked", "detail": "self-collision guard"})
        self.tick = t
        if applied:
            self.q = candidate
            self._refresh_state()
        if self.goal_distance < self._best_distance - self.config.stall_threshold:
            self._best_distance = self.goal_distance
            self._last_best_tick = t
        if self.goal_distance <= self.scene.goal.epsilon:
            self.status = SUCCEEDED
        elif t >= self.config.max_ticks:
            self.status = FAILED_MAX_TICKS
        min_clear = (
            float(self.clearance.min_distance) if self.clearance.obstacle_index >= 0 else None
        )
        record = TickRecord(
            tick=t,
            active=tuple(active),
            deltas=deltas,
            summed=tuple(float(v) for v in summed),
            applied=applied,
            q=tuple(float(v) for v in self.q),
            goal_distance=float(self.goal_distance),
            min_clearance=min_clear,
            line_of_sight=bool(self.los),
            events=tuple(events),
        )
        self.records.append(record)
        return record

    def run(self) -> Trace:
        while self.status == RUNNING:
            self.step()
        return Trace(seed=self.seed, q0=self.q0, status=self.status, records=self.records)
