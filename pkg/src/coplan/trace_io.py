"""Trace files (JSON lines) and run metrics.

A trace file is: one header record carrying the scenario hash, seed and
initial configuration; one record per tick; one end record with the final
status. read(write(trace)) is the identity.
"""

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from coplan import kinematics
from coplan.engine import TickRecord, Trace
from coplan.geometry import line_of_sight


class TraceFormatError(ValueError):
    pass


def _record_to_dict(rec: TickRecord) -> dict:
    return {
        "type": "tick",
        "tick": rec.tick,
        "active": list(rec.active),
        "deltas": {k: list(v) for k, v in rec.deltas.items()},
        "summed": list(rec.summed),
        "applied": rec.applied,
        "q": list(rec.q),
        "goal_distance": rec.goal_distance,
        "min_clearance": rec.min_clearance,
        "line_of_sight": rec.line_of_sight,
        "events": list(rec.events),
    }


def _record_from_dict(d: dict) -> TickRecord:
    return TickRecord(
        tick=d["tick"],
        active=tuple(d["active"]),
        deltas={k: tuple(v) for k, v in d["deltas"].items()},
        summed=tuple(d["summed"]),
        applied=d["applied"],
        q=tuple(d["q"]),
        goal_distance=d["goal_distance"],
        min_clearance=d["min_clearance"],
        line_of_sight=d["line_of_sight"],
        events=tuple(d["events"]),
    )


def write_trace(trace: Trace, sink) -> None:
    """Write a trace as JSON lines to a path or an open text file."""
    if isinstance(sink, (str, bytes)) or hasattr(sink, "__fspath__"):
        with open(sink, "w", encoding="utf-8") as fh:
            write_trace(trace, fh)
        return
    header = {
        "type": "header",
        "schema_version": "1",
        "scenario_hash": trace.scenario_hash,
        "seed": trace.seed,
        "q0": list(trace.q0),
    }
    if trace.scenario is not None:
        header["scenario"] = trace.scenario
    sink.write(json.dumps(header) + "\n")
    for rec in trace.records:
        sink.write(json.dumps(_record_to_dict(rec)) + "\n")
    sink.write(json.dumps({"type": "end", "status": trace.status}) + "\n")


def read_trace(source, expected_hash=None):
    """Read a trace from a path or open file. Returns (trace, warnings)."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "r", encoding="utf-8") as fh:
            return read_trace(fh, expected_hash)
    warnings = []
    header = None
    records = []
    status = None
    for lineno, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            d = json.loads(line)
            typ = d["type"]
            if typ == "header":
                header = d
            elif typ == "tick":
                records.append(_record_from_dict(d))
            elif typ == "end":
                status = d["status"]
            else:
                raise KeyError(f"unknown record type {typ!r}")
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise TraceFormatError(f"line {lineno}: corrupt trace record ({exc})") from exc
    if header is None:
        raise TraceFormatError("line 1: missing header record")
    if status is None:
        raise TraceFormatError("missing end record")
    if expected_hash is not None and header.get("scenario_hash") != expected_hash:
        warnings.append(
            f"scenario hash mismatch: trace has {header.get('scenario_hash')}, expected {expected_hash}"
        )
    trace = Trace(
        seed=header["seed"],
        q0=tuple(header["q0"]),
        status=status,
        records=records,
        scenario_hash=header.get("scenario_hash"),
        scenario=header.get("scenario"),
    )
    return trace, warnings


@dataclass(frozen=True)
class Metrics:
    success: bool
    ticks_used: int
    workspace_path_length: float
    config_path_length: float
    min_clearance: float | None
    blocked_ticks: int
    line_of_sight_fraction: float
    comfort: float

    def to_dict(self):
        return asdict(self)


def comfort_score(q, limits) -> float:
    """Mean-square normalized distance from mid-range, per coordinate."""
    q = np.asarray(q, dtype=float)
    dev = (q - limits.mid) / (0.5 * limits.range)
    return float(np.dot(dev, dev) / q.shape[0])


def compute_metrics(trace: Trace, model, scene) -> Metrics:
    if not trace.records:
        raise TraceFormatError("cannot compute metrics of an empty trace")
    goal_frame = scene.goal.frame
    qs = [np.asarray(trace.q0)] + [np.asarray(r.q) for r in trace.records]
    pts = [kinematics.forward_kinematics(model, q).frames[goal_frame] for q in qs]
    wlen = 0.0
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        wlen += math.hypot(x1 - x0, y1 - y0)
    clen = 0.0
    for q0, q1 in zip(qs, qs[1:]):
        clen += float(np.linalg.norm(q1 - q0))
    clear_values = [r.min_clearance for r in trace.records if r.min_clearance is not None]
    min_clear = min(clear_values) if clear_values else None
    blocked = sum(1 for r in trace.records if not r.applied)
    los = sum(1 for r in trace.records if r.line_of_sight) / len(trace.records)
    comfort = float(np.mean([comfort_score(q, model.limits) for q in qs]))
    return Metrics(
        success=trace.status == "Succeeded",
        ticks_used=trace.records[-1].tick,
        workspace_path_length=wlen,
        config_path_length=clen,
        min_clearance=min_clear,
        blocked_ticks=blocked,
        line_of_sight_fraction=los,
        comfort=comfort,
    )
