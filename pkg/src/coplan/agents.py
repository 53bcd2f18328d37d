"""Elementary agents.

Each agent sees an immutable per-tick snapshot and emits a raw
configuration-space delta; the engine normalizes (clamps) it to the agent's
step bound. Workspace pulls are mapped into configuration space through the
Jacobian transpose at the relevant body point.
"""

import math
from dataclasses import dataclass, field
from collections import deque

import numpy as np

from coplan import kinematics

ATTRACTION = "attraction"
COLLISION = "collision"
JOINT_LIMIT = "joint_limit"
POSTURE = "posture"
PERTURBATION = "perturbation"
OPERATOR = "operator"

KINDS = (ATTRACTION, COLLISION, JOINT_LIMIT, POSTURE, PERTURBATION, OPERATOR)


class AgentParamError(ValueError):
    pass


@dataclass(frozen=True)
class AttractionParams:
    frame: str = "ee"


@dataclass(frozen=True)
class CollisionParams:
    influence: float = 0.5   # workspace influence distance, > 0
    gain: float = 1.0        # repulsion gain, > 0

    def __post_init__(self):
        if not self.influence > 0.0:
            raise AgentParamError("collision influence distance must be > 0")
        if not self.gain > 0.0:
            raise AgentParamError("collision gain must be > 0")


@dataclass(frozen=True)
class JointLimitParams:
    margin: float = 0.1      # fraction of each joint range, in (0, 0.5)

    def __post_init__(self):
        if not 0.0 < self.margin < 0.5:
            raise AgentParamError("joint limit margin must be in (0, 0.5)")


@dataclass(frozen=True)
class PostureParams:
    weights: tuple | None = None   # per-joint weights >= 0; None = all ones

    def __post_init__(self):
        if self.weights is not None and any(w < 0 for w in self.weights):
            raise AgentParamError("posture weights must be >= 0")


@dataclass(frozen=True)
class PerturbationParams:
    trigger: str = "stall"   # "stall" or "always"

    def __post_init__(self):
        if self.trigger not in ("stall", "always"):
            raise AgentParamError("perturbation trigger must be 'stall' or 'always'")


@dataclass(frozen=True)
class OperatorParams:
    pass


PARAM_TYPES = {
    ATTRACTION: AttractionParams,
    COLLISION: CollisionParams,
    JOINT_LIMIT: JointLimitParams,
    POSTURE: PostureParams,
    PERTURBATION: PerturbationParams,
    OPERATOR: OperatorParams,
}


@dataclass(frozen=True)
class DirectDelta:
    vector: tuple


@dataclass(frozen=True)
class WorkspacePull:
    frame: str
    vector: tuple


class OperatorQueue:
    """Single-producer/single-consumer command queue for the operator agent."""

    def __init__(self):
        self._q = deque()

    def push(self, cmd):
        self._q.append(cmd)

    def drain(self):
        out = []
        while self._q:
            out.append(self._q.popleft())
        return out

    def __len__(self):
        return len(self._q)


@dataclass(frozen=True)
class Snapshot:
    """Immutable agent view of the blackboard for one tick."""

    tick: int
    q: np.ndarray
    model: object
    scene: object
    body: kinematics.EmbeddedBody
    clearance: object
    goal_distance: float
    stalled: bool


def attraction_contribute(s: Snapshot, p: AttractionParams) -> np.ndarray:
    goal = s.scene.goal
    fx, fy = s.body.frames[p.frame]
    ex = goal.point[0] - fx
    ey = goal.point[1] - fy
    if math.hypot(ex, ey) <= goal.epsilon:
        return np.zeros(s.model.dim)
    jac = kinematics.jacobian(s.model, s.q, p.frame)
    return jac.T @ np.array([ex, ey])


def collision_contribute(s: Snapshot, p: CollisionParams) -> np.ndarray:
    rep = s.clearance
    d = rep.min_distance
    if d >= p.influence or rep.obstacle_index < 0:
        return np.zeros(s.model.dim)
    vx = rep.body_point[0] - rep.obstacle_point[0]
    vy = rep.body_point[1] - rep.obstacle_point[1]
    vn = math.hypot(vx, vy)
    if vn <= 1e-12:
        return np.zeros(s.model.dim)
    ux, uy = vx / vn, vy / vn
    if d <= 0.0:
        # Penetration (guard off): fixed-magnitude push along the witness normal.
        ux, uy = -ux, -uy
        mag = p.gain / (p.influence * p.influence)
    else:
        mag = p.gain * (1.0 / d - 1.0 / p.influence) / (d * d)
    jac = kinematics.point_jacobian(s.model, s.q, rep.body_shape_index, rep.body_point)
    return jac.T @ np.array([mag * ux, mag * uy])


def joint_limit_contribute(s: Snapshot, p: JointLimitParams) -> np.ndarray:
    limits = s.model.limits
    lo = limits.lower + p.margin * limits.range
    hi = limits.upper - p.margin * limits.range
    raw = np.zeros(s.model.dim)
    below = s.q < lo
    above = s.q > hi
    raw[below] = lo[below] - s.q[below]
    raw[above] = hi[above] - s.q[above]
    return raw


def posture_contribute(s: Snapshot, p: PostureParams) -> np.ndarray:
    w = np.ones(s.model.dim) if p.weights is None else np.asarray(p.weights, dtype=float)
    if w.shape != (s.model.dim,):
        raise AgentParamError("posture weights length must equal model dimension")
    return w * (s.model.limits.mid - s.q)


def perturbation_contribute(s: Snapshot, p: PerturbationParams, rng) -> np.ndarray:
    if p.trigger == "stall" and not s.stalled:
        return np.zeros(s.model.dim)
    v = rng.normal(size=s.model.dim)
    n = np.linalg.norm(v)
    if n <= 1e-12:
        return np.zeros(s.model.dim)
    return v / n


def operator_contribute(s: Snapshot, queue: OperatorQueue):
    """Drain the queue, keep the latest movement command. Returns (raw, events)."""
    cmds = queue.drain()
    events = []
    chosen = None
    for cmd in cmds:
        if chosen is not None:
            events.append({"kind": "superseded", "detail": _cmd_name(chosen)})
        chosen = cmd
    if chosen is None:
        return np.zeros(s.model.dim), events
    try:
        if isinstance(chosen, DirectDelta):
            raw = np.asarray(chosen.vector, dtype=float)
            if raw.shape != (s.model.dim,):
                raise ValueError("delta dimension mismatch")
        elif isinstance(chosen, WorkspacePull):
            jac = kinematics.jacobian(s.model, s.q, chosen.frame)
            raw = jac.T @ np.asarray(chosen.vector, dtype=float)
        else:
            raise ValueError(f"unknown operator command {chosen!r}")
    except (ValueError, kinematics.KinematicsError) as exc:
        events.append({"kind": "error", "detail": str(exc)})
        return np.zeros(s.model.dim), events
    return raw, events


def _cmd_name(cmd):
    return type(cmd).__name__


def contribute(kind, params, s: Snapshot, rng=None, queue=None):
    """Dispatch one agent activation. Returns (raw_delta, events)."""
    if kind == ATTRACTION:
        return attraction_contribute(s, params), []
    if kind == COLLISION:
        return collision_contribute(s, params), []
    if kind == JOINT_LIMIT:
        return joint_limit_contribute(s, params), []
    if kind == POSTURE:
        return posture_contribute(s, params), []
    if kind == PERTURBATION:
        return perturbation_contribute(s, params, rng), []
    if kind == OPERATOR:
        return operator_contribute(s, queue)
    raise AgentParamError(f"unknown agent kind {kind!r}")
