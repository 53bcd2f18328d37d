"""Declarative scenario files.

JSON syntax, schema_version "1" (field names frozen in docs/scenario_schema.md).
Parsing is strict: unknown fields are rejected and all validation errors are
reported at once with their field paths. Omitted step bounds and parameters
are filled with defaults and written back into the canonical form, so traces
are self-describing; the scenario hash is the sha256 of the canonical JSON.
"""

import hashlib
import json
import math

import numpy as np

from coplan import agents as agents_mod
from coplan import engine as engine_mod
from coplan.geometry import Bounds, Capsule, Circle, ConvexPolygon, GeometryError, Goal, Scene
from coplan.kinematics import JointLimits, KinematicsError, PlanarChain, PointRobot, RigidPolygon

SCHEMA_VERSION = "1"

# Agents whose step bound lives in workspace units default to a fraction of
# the scene diagonal; joint-space agents default to a fixed radian-scale bound.
WORKSPACE_KINDS = (
    agents_mod.ATTRACTION,
    agents_mod.COLLISION,
    agents_mod.PERTURBATION,
    agents_mod.OPERATOR,
)
DEFAULT_STEP_FRACTION = 0.05
DEFAULT_JOINT_STEP = 0.05

_PARAM_FIELDS = {
    agents_mod.ATTRACTION: {"frame": "ee"},
    agents_mod.COLLISION: {"influence": 0.5, "gain": 1.0},
    agents_mod.JOINT_LIMIT: {"margin": 0.1},
    agents_mod.POSTURE: {"weights": None},
    agents_mod.PERTURBATION: {"trigger": "stall"},
    agents_mod.OPERATOR: {},
}


class ScenarioError(ValueError):
    """Carries every validation error found, each prefixed with its field path."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class _Ctx:
    def __init__(self):
        self.errors = []

    def err(self, path, msg):
        self.errors.append(f"{path}: {msg}")

    def check_keys(self, obj, path, allowed):
        for key in obj:
            if key not in allowed:
                self.err(f"{path}.{key}", "unknown field")

    def require(self, obj, path, key):
        if key not in obj:
            self.err(f"{path}.{key}", "missing required field")
            return None
        return obj[key]

    def number(self, val, path):
        if not isinstance(val, (int, float)) or isinstance(val, bool) or not math.isfinite(val):
            self.err(path, "expected a finite number")
            return None
        return float(val)

    def integer(self, val, path):
        if not isinstance(val, int) or isinstance(val, bool):
            self.err(path, "expected an integer")
            return None
        return val

    def string(self, val, path):
        if not isinstance(val, str):
            self.err(path, "expected a string")
            return None
        return val

    def boolean(self, val, path):
        if not isinstance(val, bool):
            self.err(path, "expected a boolean")
            return None
        return val

    def point(self, val, path):
        if (
            not isinstance(val, list)
            or len(val) != 2
            or any(self.number(v, f"{path}[{i}]") is None for i, v in enumerate(val))
        ):
            self.err(path, "expected [x, y]")
            return None
        return [float(val[0]), float(val[1])]

    def vector(self, val, path):
        if not isinstance(val, list) or not val:
            self.err(path, "expected a non-empty list of numbers")
            return None
        out = []
        for i, v in enumerate(val):
            n = self.number(v, f"{path}[{i}]")
            if n is None:
                return None
            out.append(n)
        return out

    def obj(self, val, path):
        if not isinstance(val, dict):
            self.err(path, "expected an object")
            return None
        return val


class Scenario:
    """A validated scenario plus its canonical form."""

    def __init__(self, canonical, model, scene, specs, config, seed, script, q0):
        self.canonical = canonical
        self.model = model
        self.scene = scene
        self.specs = specs
        self.config = config
        self.seed = seed
        self.script = script
        self.q0 = q0

    @property
    def name(self):
        return self.canonical["name"]

    def to_json(self):
        return canonical_json(self.canonical)

    @property
    def hash(self):
        return scenario_hash(self.canonical)

    def run(self, seed=None) -> engine_mod.Trace:
        """Headless run; the returned trace embeds the canonical scenario."""
        eng = self.make_engine(seed=seed)
        trace = eng.run()
        canonical = self.canonical if seed is None else {**self.canonical, "seed": seed}
        trace.scenario = canonical
        trace.scenario_hash = scenario_hash(canonical)
        return trace

    def make_engine(self, seed=None, script=None) -> engine_mod.Engine:
        return engine_mod.Engine(
            model=self.model,
            scene=self.scene,
            specs=self.specs,
            config=self.config,
            seed=self.seed if seed is None else seed,
            q0=self.q0,
            script=self.script if script is None else script,
        )


def canonical_json(canonical_dict) -> str:
    return json.dumps(canonical_dict, sort_keys=True, separators=(",", ":"))


def scenario_hash(canonical_dict) -> str:
    return hashlib.sha256(canonical_json(canonical_dict).encode()).hexdigest()


def _parse_obstacle(ctx, ob, path):
    ob = ctx.obj(ob, path)
    if ob is None:
        return None, None
    typ = ctx.string(ctx.require(ob, path, "type"), f"{path}.type")
    if typ == "circle":
        ctx.check_keys(ob, path, {"type", "center", "radius"})
        center = ctx.point(ctx.require(ob, path, "center"), f"{path}.center")
        radius = ctx.number(ctx.require(ob, path, "radius"), f"{path}.radius")
        if center is None or radius is None:
            return None, None
        try:
            return Circle(tuple(center), radius), {"type": "circle", "center": center, "radius": radius}
        except GeometryError as exc:
            ctx.err(path, str(exc))
    elif typ == "polygon":
        ctx.check_keys(ob, path, {"type", "vertices"})
        verts = ctx.require(ob, path, "vertices")
        if not isinstance(verts, list):
            ctx.err(f"{path}.vertices", "expected a list of points")
            return None, None
        pts = [ctx.point(v, f"{path}.vertices[{i}]") for i, v in enumerate(verts)]
        if any(p is None for p in pts):
            return None, None
        try:
            return ConvexPolygon(pts), {"type": "polygon", "vertices": pts}
        except GeometryError as exc:
            ctx.err(f"{path}.vertices", str(exc))
    elif typ == "capsule":
        ctx.check_keys(ob, path, {"type", "a", "b", "radius"})
        a = ctx.point(ctx.require(ob, path, "a"), f"{path}.a")
        b = ctx.point(ctx.require(ob, path, "b"), f"{path}.b")
        radius = ctx.number(ctx.require(ob, path, "radius"), f"{path}.radius")
        if a is None or b is None or radius is None:
            return None, None
        try:
            return Capsule(tuple(a), tuple(b), radius), {
                "type": "capsule", "a": a, "b": b, "radius": radius,
            }
        except GeometryError as exc:
            ctx.err(path, str(exc))
    elif typ is not None:
        ctx.err(f"{path}.type", f"unknown obstacle type {typ!r}")
    return None, None


def _parse_limits(ctx, raw, path, dim, default=None):
    if raw is None:
        if default is not None:
            return default, {"lower": list(default.lower), "upper": list(default.upper)}
        ctx.err(path, "missing required field")
        return None, None
    raw = ctx.obj(raw, path)
    if raw is None:
        return None, None
    ctx.check_keys(raw, path, {"lower", "upper"})
    lower = ctx.vector(ctx.require(raw, path, "lower"), f"{path}.lower")
    upper = ctx.vector(ctx.require(raw, path, "upper"), f"{path}.upper")
    if lower is None or upper is None:
        return None, None
    if dim is not None and (len(lower) != dim or len(upper) != dim):
        ctx.err(path, f"limit vectors must have dimension {dim}")
        return None, None
    try:
        lim = JointLimits(np.array(lower), np.array(upper))
    except KinematicsError as exc:
        ctx.err(path, str(exc))
        return None, None
    return lim, {"lower": lower, "upper": upper}


def _parse_model(ctx, raw, path, bounds):
    raw = ctx.obj(raw, path)
    if raw is None:
        return None, None, None
    typ = ctx.string(ctx.require(raw, path, "type"), f"{path}.type")
    if typ == "point":
        ctx.check_keys(raw, path, {"type", "radius", "start", "limits"})
        radius = ctx.number(raw.get("radius", 0.0), f"{path}.radius")
        start = ctx.point(ctx.require(raw, path, "start"), f"{path}.start")
        default_limits = None
        if bounds is not None:
            default_limits = JointLimits(
                np.array([bounds.xmin, bounds.ymin]), np.array([bounds.xmax, bounds.ymax])
            )
        limits, limits_c = _parse_limits(ctx, raw.get("limits"), f"{path}.limits", 2, default_limits)
        if radius is None or start is None or limits is None:
            return None, None, None
        try:
            model = PointRobot(radius, limits)
        except KinematicsError as exc:
            ctx.err(path, str(exc))
            return None, None, None
        return model, start, {"type": "point", "radius": radius, "start": start, "limits": limits_c}
    if typ == "rigid_polygon":
        ctx.check_keys(raw, path, {"type", "vertices", "start", "limits"})
        verts = raw.get("vertices")
        if not isinstance(verts, list):
            ctx.err(f"{path}.vertices", "expected a list of points")
            return None, None, None
        pts = [ctx.point(v, f"{path}.vertices[{i}]") for i, v in enumerate(verts)]
        start = ctx.vector(ctx.require(raw, path, "start"), f"{path}.start")
        limits, limits_c = _parse_limits(ctx, raw.get("limits"), f"{path}.limits", 3)
        if any(p is None for p in pts) or start is None or limits is None:
            return None, None, None
        if len(start) != 3:
            ctx.err(f"{path}.start", "expected [x, y, theta]")
            return None, None, None
        try:
            model = RigidPolygon(pts, limits)
        except (GeometryError, KinematicsError) as exc:
            ctx.err(path, str(exc))
            return None, None, None
        return model, start, {
            "type": "rigid_polygon", "vertices": pts, "start": start, "limits": limits_c,
        }
    if typ == "chain":
        ctx.check_keys(raw, path, {"type", "base", "link_lengths", "link_radii", "start", "limits"})
        base = ctx.point(ctx.require(raw, path, "base"), f"{path}.base")
        lengths = ctx.vector(ctx.require(raw, path, "link_lengths"), f"{path}.link_lengths")
        radii = ctx.vector(ctx.require(raw, path, "link_radii"), f"{path}.link_radii")
        start = ctx.vector(ctx.require(raw, path, "start"), f"{path}.start")
        dim = len(lengths) if lengths else None
        limits, limits_c = _parse_limits(ctx, raw.get("limits"), f"{path}.limits", dim)
        if None in (base, lengths, radii, start, limits):
            return None, None, None
        if len(start) != len(lengths):
            ctx.err(f"{path}.start", "length must equal link count")
            return None, None, None
        try:
            model = PlanarChain(base, lengths, radii, limits)
        except KinematicsError as exc:
            ctx.err(path, str(exc))
            return None, None, None
        return model, start, {
            "type": "chain", "base": base, "link_lengths": lengths,
            "link_radii": radii, "start": start, "limits": limits_c,
        }
    if typ is not None:
        ctx.err(f"{path}.type", f"unknown model type {typ!r}")
    return None, None, None


def _parse_agent(ctx, raw, path, default_workspace_step, model):
    raw = ctx.obj(raw, path)
    if raw is None:
        return None, None
    ctx.check_keys(raw, path, {"id", "kind", "period", "step_bound", "enabled", "params"})
    agent_id = ctx.string(ctx.require(raw, path, "id"), f"{path}.id")
    kind = ctx.string(ctx.require(raw, path, "kind"), f"{path}.kind")
    period = ctx.integer(ctx.require(raw, path, "period"), f"{path}.period")
    if kind is not None and kind not in agents_mod.KINDS:
        ctx.err(f"{path}.kind", f"unknown agent kind {kind!r}; expected one of {list(agents_mod.KINDS)}")
        return None, None
    if period is not None and period < 1:
        ctx.err(f"{path}.period", "must be >= 1")
        return None, None
    if "step_bound" in raw:
        step = ctx.number(raw["step_bound"], f"{path}.step_bound")
        if step is not None and step <= 0:
            ctx.err(f"{path}.step_bound", "must be > 0")
            return None, None
    elif kind in WORKSPACE_KINDS:
        step = default_workspace_step
    else:
        step = DEFAULT_JOINT_STEP
    enabled = True
    if "enabled" in raw:
        enabled = ctx.boolean(raw["enabled"], f"{path}.enabled")
    params_raw = raw.get("params", {})
    params_raw = ctx.obj(params_raw, f"{path}.params")
    if None in (agent_id, kind, period, step, enabled) or params_raw is None:
        return None, None
    fields = _PARAM_FIELDS[kind]
    ctx.check_keys(params_raw, f"{path}.params", set(fields))
    merged = dict(fields)
    merged.update(params_raw)
    ppath = f"{path}.params"
    try:
        if kind == agents_mod.ATTRACTION:
            frame = ctx.string(merged["frame"], f"{ppath}.frame")
            if frame is None:
                return None, None
            if model is not None and frame not in model.frame_ids:
                ctx.err(f"{ppath}.frame", f"model has no frame {frame!r}")
                return None, None
            params = agents_mod.AttractionParams(frame=frame)
            merged = {"frame": frame}
        elif kind == agents_mod.COLLISION:
            params = agents_mod.CollisionParams(
                influence=float(merged["influence"]), gain=float(merged["gain"])
            )
            merged = {"influence": params.influence, "gain": params.gain}
        elif kind == agents_mod.JOINT_LIMIT:
            params = agents_mod.JointLimitParams(margin=float(merged["margin"]))
            merged = {"margin": params.margin}
        elif kind == agents_mod.POSTURE:
            weights = merged["weights"]
            if weights is not None:
                weights = ctx.vector(weights, f"{ppath}.weights")
                if weights is None:
                    return None, None
                if model is not None and len(weights) != model.dim:
                    ctx.err(f"{ppath}.weights", "length must equal model dimension")
                    return None, None
                params = agents_mod.PostureParams(weights=tuple(weights))
            else:
                params = agents_mod.PostureParams()
            merged = {"weights": weights}
        elif kind == agents_mod.PERTURBATION:
            params = agents_mod.PerturbationParams(trigger=merged["trigger"])
            merged = {"trigger": params.trigger}
        else:
            params = agents_mod.OperatorParams()
            merged = {}
    except (TypeError, ValueError) as exc:
        ctx.err(ppath, str(exc))
        return None, None
    try:
        spec = engine_mod.AgentSpec(
            id=agent_id, kind=kind, params=params,
            period=period, step_bound=float(step), enabled=enabled,
        )
    except engine_mod.EngineError as exc:
        ctx.err(path, str(exc))
        return None, None
    canonical = {
        "id": agent_id, "kind": kind, "period": period,
        "step_bound": float(step), "enabled": enabled, "params": merged,
    }
    return spec, canonical


def _parse_command(ctx, raw, path, model):
    raw = ctx.obj(raw, path)
    if raw is None:
        return None, None
    typ = ctx.string(ctx.require(raw, path, "type"), f"{path}.type")
    if typ == "pull":
        ctx.check_keys(raw, path, {"type", "frame", "vector"})
        frame = ctx.string(ctx.require(raw, path, "frame"), f"{path}.frame")
        vector = ctx.point(ctx.require(raw, path, "vector"), f"{path}.vector")
        if frame is None or vector is None:
            return None, None
        if model is not None and frame not in model.frame_ids:
            ctx.err(f"{path}.frame", f"model has no frame {frame!r}")
            return None, None
        return (
            agents_mod.WorkspacePull(frame, tuple(vector)),
            {"type": "pull", "frame": frame, "vector": vector},
        )
    if typ == "delta":
        ctx.check_keys(raw, path, {"type", "vector"})
        vector = ctx.vector(ctx.require(raw, path, "vector"), f"{path}.vector")
        if vector is None:
            return None, None
        if model is not None and len(vector) != model.dim:
            ctx.err(f"{path}.vector", "length must equal model dimension")
            return None, None
        return (
            agents_mod.DirectDelta(tuple(vector)),
            {"type": "delta", "vector": vector},
        )
    if typ == "set_agent":
        ctx.check_keys(raw, path, {"type", "id", "period", "step_bound", "enabled"})
        agent_id = ctx.string(ctx.require(raw, path, "id"), f"{path}.id")
        period = raw.get("period")
        if period is not None:
            period = ctx.integer(period, f"{path}.period")
        step = raw.get("step_bound")
        if step is not None:
            step = ctx.number(step, f"{path}.step_bound")
        enabled = raw.get("enabled")
        if enabled is not None:
            enabled = ctx.boolean(enabled, f"{path}.enabled")
        if agent_id is None:
            return None, None
        cmd = engine_mod.SetAgent(agent_id, period=period, step_bound=step, enabled=enabled)
        canonical = {"type": "set_agent", "id": agent_id}
        for key, val in (("period", period), ("step_bound", step), ("enabled", enabled)):
            if val is not None:
                canonical[key] = val
        return cmd, canonical
    if typ is not None:
        ctx.err(f"{path}.type", f"unknown command type {typ!r}")
    return None, None


def parse_scenario_dict(data) -> Scenario:
    ctx = _Ctx()
    data = ctx.obj(data, "$")
    if data is None:
        raise ScenarioError(ctx.errors)
    ctx.check_keys(
        data, "$",
        {"schema_version", "name", "scene", "model", "agents", "engine", "seed", "operator_script"},
    )
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        ctx.err("$.schema_version", f"unsupported schema version {version!r}")
    name = ctx.string(ctx.require(data, "$", "name"), "$.name")

    # scene
    bounds = None
    scene = None
    obstacles = []
    obstacles_c = []
    goal = None
    goal_c = None
    scene_raw = ctx.obj(ctx.require(data, "$", "scene"), "$.scene")
    if scene_raw is not None:
        ctx.check_keys(scene_raw, "$.scene", {"bounds", "obstacles", "goal"})
        braw = ctx.obj(ctx.require(scene_raw, "$.scene", "bounds"), "$.scene.bounds")
        if braw is not None:
            ctx.check_keys(braw, "$.scene.bounds", {"xmin", "ymin", "xmax", "ymax"})
            vals = {k: ctx.number(ctx.require(braw, "$.scene.bounds", k), f"$.scene.bounds.{k}")
                    for k in ("xmin", "ymin", "xmax", "ymax")}
            if all(v is not None for v in vals.values()):
                try:
                    bounds = Bounds(**vals)
                except GeometryError as exc:
                    ctx.err("$.scene.bounds", str(exc))
        obs_raw = scene_raw.get("obstacles", [])
        if not isinstance(obs_raw, list):
            ctx.err("$.scene.obstacles", "expected a list")
        else:
            for i, ob in enumerate(obs_raw):
                shape, canon = _parse_obstacle(ctx, ob, f"$.scene.obstacles[{i}]")
                if shape is not None:
                    obstacles.append(shape)
                    obstacles_c.append(canon)
        graw = ctx.obj(ctx.require(scene_raw, "$.scene", "goal"), "$.scene.goal")
        if graw is not None:
            ctx.check_keys(graw, "$.scene.goal", {"frame", "point", "epsilon"})
            frame = ctx.string(ctx.require(graw, "$.scene.goal", "frame"), "$.scene.goal.frame")
            point = ctx.point(ctx.require(graw, "$.scene.goal", "point"), "$.scene.goal.point")
            eps = ctx.number(ctx.require(graw, "$.scene.goal", "epsilon"), "$.scene.goal.epsilon")
            if None not in (frame, point, eps):
                try:
                    goal = Goal(frame, tuple(point), eps)
                    goal_c = {"frame": frame, "point": point, "epsilon": eps}
                except GeometryError as exc:
                    ctx.err("$.scene.goal", str(exc))

    # model
    model, start, model_c = _parse_model(ctx, data.get("model"), "$.model", bounds)
    if "model" not in data:
        ctx.err("$.model", "missing required field")

    if bounds is not None and goal is not None:
        try:
            scene = Scene(bounds, tuple(obstacles), goal)
        except GeometryError as exc:
            ctx.err("$.scene", str(exc))
    if scene is not None and model is not None and goal.frame not in model.frame_ids:
        ctx.err("$.scene.goal.frame", f"model has no frame {goal.frame!r}")

    # agents
    default_step = DEFAULT_STEP_FRACTION * bounds.diagonal if bounds is not None else 0.05
    specs = []
    agents_c = []
    agents_raw = ctx.require(data, "$", "agents")
    if agents_raw is not None:
        if not isinstance(agents_raw, list):
            ctx.err("$.agents", "expected a list")
        else:
            for i, araw in enumerate(agents_raw):
                spec, canon = _parse_agent(ctx, araw, f"$.agents[{i}]", default_step, model)
                if spec is not None:
                    specs.append(spec)
                    agents_c.append(canon)
            ids = [s.id for s in specs]
            if len(set(ids)) != len(ids):
                ctx.err("$.agents", "agent ids must be unique")

    # engine config
    eng_raw = data.get("engine", {})
    eng_raw = ctx.obj(eng_raw, "$.engine")
    config = None
    engine_c = None
    if eng_raw is not None:
        ctx.check_keys(eng_raw, "$.engine", {"max_ticks", "collision_guard", "self_collision_guard", "stall"})
        max_ticks = eng_raw.get("max_ticks", 1000)
        max_ticks = ctx.integer(max_ticks, "$.engine.max_ticks")
        guard = eng_raw.get("collision_guard", engine_mod.GUARD_HARD)
        guard = ctx.string(guard, "$.engine.collision_guard")
        self_guard = eng_raw.get("self_collision_guard", False)
        self_guard = ctx.boolean(self_guard, "$.engine.self_collision_guard")
        stall_raw = ctx.obj(eng_raw.get("stall", {}), "$.engine.stall")
        window, threshold = 50, 1e-3
        if stall_raw is not None:
            ctx.check_keys(stall_raw, "$.engine.stall", {"window", "threshold"})
            window = ctx.integer(stall_raw.get("window", 50), "$.engine.stall.window")
            threshold = ctx.number(stall_raw.get("threshold", 1e-3), "$.engine.stall.threshold")
        if None not in (max_ticks, guard, self_guard, window, threshold):
            try:
                config = engine_mod.EngineConfig(
                    max_ticks=max_ticks, collision_guard=guard,
                    self_collision_guard=self_guard,
                    stall_window=window, stall_threshold=threshold,
                )
                engine_c = {
                    "max_ticks": max_ticks, "collision_guard": guard,
                    "self_collision_guard": self_guard,
                    "stall": {"window": window, "threshold": threshold},
                }
            except engine_mod.EngineError as exc:
                ctx.err("$.engine", str(exc))

    seed = ctx.integer(ctx.require(data, "$", "seed"), "$.seed")

    # operator script
    script = []
    script_c = []
    script_raw = data.get("operator_script", [])
    if not isinstance(script_raw, list):
        ctx.err("$.operator_script", "expected a list")
    else:
        for i, entry in enumerate(script_raw):
            path = f"$.operator_script[{i}]"
            entry = ctx.obj(entry, path)
            if entry is None:
                continue
            ctx.check_keys(entry, path, {"tick", "command"})
            tick = ctx.integer(ctx.require(entry, path, "tick"), f"{path}.tick")
            if tick is not None and tick < 0:
                ctx.err(f"{path}.tick", "must be >= 0")
                tick = None
            cmd, cmd_c = _parse_command(ctx, ctx.require(entry, path, "command"), f"{path}.command", model)
            if tick is not None and cmd is not None:
                script.append(engine_mod.ScriptEntry(tick, cmd))
                script_c.append({"tick": tick, "command": cmd_c})
            known = {s.id for s in specs}
            if cmd is not None and isinstance(cmd, engine_mod.SetAgent) and cmd.agent_id not in known:
                ctx.err(f"{path}.command.id", f"unknown agent id {cmd.agent_id!r}")

    if ctx.errors:
        raise ScenarioError(ctx.errors)

    canonical = {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "scene": {"bounds": {"xmin": bounds.xmin, "ymin": bounds.ymin,
                             "xmax": bounds.xmax, "ymax": bounds.ymax},
                  "obstacles": obstacles_c, "goal": goal_c},
        "model": model_c,
        "agents": agents_c,
        "engine": engine_c,
        "seed": seed,
        "operator_script": script_c,
    }
    return Scenario(canonical, model, scene, specs, config, seed, script, start)


def parse_scenario(text: str) -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError([f"$: invalid JSON: {exc}"]) from exc
    return parse_scenario_dict(data)


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scenario(fh.read())
