"""Live operator sessions over WebSocket.

One controlling client steers a paused-by-default engine; extra clients are
read-only. Every frame is a single JSON object with a "type" field; commands
carry a client seq that is echoed in exactly one ack or err. Movement
commands join the operator agent's queue (taking effect at its next
activation); control commands apply between ticks. Field names are frozen in
docs/protocol.md.

The session logs every state-affecting command with its arrival tick, so the
log can be replayed headlessly as an operator_script to reproduce the trace.
"""

import asyncio
import io
import json
import logging
import math

from coplan import engine as engine_mod
from coplan import trace_io
from coplan.agents import DirectDelta, WorkspacePull
from coplan.geometry import Capsule, Circle, ConvexPolygon
from coplan.scenario import ScenarioError, Scenario, parse_scenario_dict, scenario_hash

log = logging.getLogger("coplan.bridge")


def _shape_to_dict(shape):
    if isinstance(shape, Circle):
        return {"type": "circle", "center": list(shape.center), "radius": shape.radius}
    if isinstance(shape, Capsule):
        return {"type": "capsule", "a": list(shape.a), "b": list(shape.b), "radius": shape.radius}
    return {"type": "polygon", "vertices": shape.vertices.tolist()}


class Session:
    """Engine plus connected clients; single controller, read-only observers."""

    def __init__(self, scenario: Scenario, snapshot_every: int = 1, rate: float = 50.0):
        self.scenario = scenario
        self.snapshot_every = max(int(snapshot_every), 1)
        self.rate = rate
        self.clients = set()
        self.controller = None
        self.snapshot_seq = 0
        self._last_cmd_seq = None
        self.command_log = []
        self._last_active = {}
        self._reset_engine()

    def _reset_engine(self):
        self.engine = self.scenario.make_engine()
        self.engine.status = engine_mod.PAUSED
        self.command_log = []
        self._last_cmd_seq = None
        self._last_active = {s.id: None for s in self.engine.specs}

    # -- snapshots ------------------------------------------------------------

    def snapshot_msg(self) -> dict:
        eng = self.engine
        scn = self.scenario
        self.snapshot_seq += 1
        try:
            metrics = (
                trace_io.compute_metrics(self._current_trace(), scn.model, scn.scene).to_dict()
                if eng.records
                else None
            )
        except trace_io.TraceFormatError:
            metrics = None
        min_clear = (
            eng.clearance.min_distance if eng.clearance.obstacle_index >= 0 else None
        )
        return {
            "type": "snapshot",
            "seq": self.snapshot_seq,
            "tick": eng.tick,
            "status": eng.status,
            "q": [float(v) for v in eng.q],
            "shapes": [_shape_to_dict(s) for s in eng.body.shapes],
            "frames": {k: list(v) for k, v in eng.body.frames.items()},
            "scene": {
                "bounds": scn.canonical["scene"]["bounds"],
                "obstacles": scn.canonical["scene"]["obstacles"],
                "goal": scn.canonical["scene"]["goal"],
            },
            "goal_distance": float(eng.goal_distance),
            "min_clearance": min_clear,
            "stalled": bool(eng.stalled),
            "agents": [
                {
                    "id": s.id,
                    "kind": s.kind,
                    "period": s.period,
                    "step_bound": s.step_bound,
                    "enabled": s.enabled,
                    "last_active_tick": self._last_active.get(s.id),
                }
                for s in eng.specs
            ],
            "metrics": metrics,
        }

    def _current_trace(self) -> engine_mod.Trace:
        eng = self.engine
        return engine_mod.Trace(
            seed=eng.seed,
            q0=eng.q0,
            status=eng.status,
            records=eng.records,
            scenario_hash=self.scenario.hash,
            scenario=self.scenario.canonical,
        )

    async def broadcast(self, msg: dict):
        text = json.dumps(msg)
        dead = []
        for ws in self.clients:
            try:
                await ws.send(text)
            except Exception:
                dead.append(ws)
        for ws in dead:
            self.clients.discard(ws)

    async def _after_tick(self, record):
        for agent_id in record.active:
            self._last_active[agent_id] = record.tick
        terminal = self.engine.status in engine_mod.TERMINAL
        if record.tick % self.snapshot_every == 0 or terminal:
            await self.broadcast(self.snapshot_msg())

    async def tick_loop(self):
        period = 1.0 / self.rate if self.rate > 0 else 0.0
        while True:
            if self.engine.status != engine_mod.RUNNING:
                await asyncio.sleep(0.02)
                continue
            record = self.engine.step()
            await self._after_tick(record)
            await asyncio.sleep(period)

    # -- commands -------------------------------------------------------------

    def _log_command(self, canonical_cmd: dict):
        self.command_log.append({"tick": self.engine.tick, "command": canonical_cmd})

    def _movement(self, msg):
        """Validate a movement command; returns (queue_cmd, canonical) or raises."""
        model = self.scenario.model
        vector = msg.get("vector")
        if (
            not isinstance(vector, list)
            or not vector
            or not all(isinstance(v, (int, float)) and math.isfinite(v) for v in vector)
        ):
            raise ValueError("vector must be a list of finite numbers")
        vector = [float(v) for v in vector]
        if msg["type"] == "inject_pull":
            frame = msg.get("frame")
            if frame not in model.frame_ids:
                raise ValueError(f"unknown frame {frame!r}")
            if len(vector) != 2:
                raise ValueError("pull vector must be [x, y]")
            return (
                WorkspacePull(frame, tuple(vector)),
                {"type": "pull", "frame": frame, "vector": vector},
            )
        if len(vector) != model.dim:
            raise ValueError(f"delta must have dimension {model.dim}")
        return DirectDelta(tuple(vector)), {"type": "delta", "vector": vector}

    async def handle_command(self, ws, msg: dict):
        seq = msg.get("seq")
        typ = msg.get("type")

        def err(text):
            return {"type": "err", "seq": seq, "error": text}

        def ack(**extra):
            return {"type": "ack", "seq": seq, **extra}

        if not isinstance(seq, int):
            return err("missing or non-integer seq")
        if typ in ("get_log", "get_trace"):
            pass  # observers may read
        elif ws is not self.controller:
            return err("read-only client: only the controller may send commands")
        if self._last_cmd_seq is not None and seq <= self._last_cmd_seq and typ not in (
            "get_log", "get_trace",
        ):
            return err(f"seq must be strictly increasing (last was {self._last_cmd_seq})")
        if ws is self.controller and typ not in ("get_log", "get_trace"):
            self._last_cmd_seq = seq

        eng = self.engine
        if typ in ("inject_delta", "inject_pull"):
            try:
                cmd, canonical = self._movement(msg)
            except ValueError as exc:
                return err(str(exc))
            eng.operator_queue.push(cmd)
            self._log_command(canonical)
            return ack(tick=eng.tick)
        if typ == "pause":
            if eng.status == engine_mod.RUNNING:
                eng.status = engine_mod.PAUSED
                await self.broadcast(self.snapshot_msg())
            return ack()
        if typ == "resume":
            if eng.status == engine_mod.PAUSED:
                eng.status = engine_mod.RUNNING
            return ack()
        if typ == "step":
            n = msg.get("n", 1)
            if not isinstance(n, int) or n < 1:
                return err("step count n must be an integer >= 1")
            for _ in range(n):
                if eng.status in engine_mod.TERMINAL:
                    break
                was = eng.status
                eng.status = engine_mod.RUNNING
                record = eng.step()
                if eng.status == engine_mod.RUNNING:
                    eng.status = was
                await self._after_tick(record)
            return ack(tick=eng.tick)
        if typ == "set_agent":
            agent_id = msg.get("id")
            if not isinstance(agent_id, str):
                return err("set_agent requires an agent id")
            period = msg.get("period")
            step_bound = msg.get("step_bound")
            enabled = msg.get("enabled")
            cmd = engine_mod.SetAgent(agent_id, period=period, step_bound=step_bound, enabled=enabled)
            error = eng.apply_set_agent(cmd)
            if error is not None:
                return err(error)
            canonical = {"type": "set_agent", "id": agent_id}
            for key, val in (("period", period), ("step_bound", step_bound), ("enabled", enabled)):
                if val is not None:
                    canonical[key] = val
            self._log_command(canonical)
            return ack()
        if typ == "reset":
            self._reset_engine()
            self._last_cmd_seq = seq
            await self.broadcast(self.snapshot_msg())
            return ack()
        if typ == "load_scenario":
            inline = msg.get("scenario")
            if not isinstance(inline, dict):
                return err("load_scenario requires an inline scenario object")
            try:
                self.scenario = parse_scenario_dict(inline)
            except ScenarioError as exc:
                return err(f"scenario validation failed: {'; '.join(exc.errors)}")
            self._reset_engine()
            self._last_cmd_seq = seq
            await self.broadcast(self.snapshot_msg())
            return ack()
        if typ == "get_log":
            return {"type": "log", "seq": seq, "entries": list(self.command_log)}
        if typ == "get_trace":
            buf = io.StringIO()
            trace_io.write_trace(self._current_trace(), buf)
            return {"type": "trace", "seq": seq, "content": buf.getvalue()}
        return err(f"unknown command type {typ!r}")

    # -- connection lifecycle -------------------------------------------------

    async def handler(self, ws):
        self.clients.add(ws)
        role = "observer"
        if self.controller is None:
            self.controller = ws
            role = "controller"
        try:
            await ws.send(json.dumps({"type": "hello", "role": role}))
            await ws.send(json.dumps(self.snapshot_msg()))
            async for raw in ws:
                try:
                    msg = json.loads(raw)
                    if not isinstance(msg, dict):
                        raise ValueError("frame must be a JSON object")
                except (json.JSONDecodeError, ValueError) as exc:
                    await ws.send(json.dumps({"type": "err", "seq": None, "error": str(exc)}))
                    continue
                reply = await self.handle_command(ws, msg)
                await ws.send(json.dumps(reply))
        finally:
            self.clients.discard(ws)
            if ws is self.controller:
                self.controller = None
                # safety default: no operator at the stick, stop the clock
                if self.engine.status == engine_mod.RUNNING:
                    self.engine.status = engine_mod.PAUSED


async def serve(scenario, port, rate=50.0, snapshot_every=1, host="127.0.0.1"):
    """Start a session server; returns (server, session)."""
    import websockets

    session = Session(scenario, snapshot_every=snapshot_every, rate=rate)
    server = await websockets.serve(session.handler, host, port)
    task = asyncio.ensure_future(session.tick_loop())
    server._coplan_tick_task = task
    return server, session


def serve_forever(scenario, port, rate=50.0, snapshot_every=1, host="127.0.0.1"):
    async def _main():
        server, _ = await serve(scenario, port, rate, snapshot_every, host)
        log.info("serving on ws://%s:%d", host, port)
        await asyncio.Future()

    asyncio.run(_main())
