"""Command-line entry points.

Exit codes: 0 success, 1 planner failure (no path / run did not succeed),
2 usage or validation error. Log level via the PLANNER_LOG env var.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from coplan import oracles, trace_io
from coplan.kinematics import PointRobot, forward_kinematics
from coplan.scenario import ScenarioError, load_scenario, parse_scenario_dict
from coplan.svg import export_svg

EXIT_OK = 0
EXIT_PLANNER_FAILURE = 1
EXIT_USAGE = 2

log = logging.getLogger("coplan")


def _load(path):
    try:
        return load_scenario(path)
    except FileNotFoundError:
        print(f"error: scenario file not found: {path}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)
    except ScenarioError as exc:
        print("scenario validation failed:", file=sys.stderr)
        for err in exc.errors:
            print(f"  {err}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _summary(scn, seed, trace, metrics, outputs):
    return {
        "scenario": scn.name,
        "seed": seed,
        "status": trace.status,
        "metrics": metrics.to_dict(),
        "outputs": outputs,
    }


def _run_one(scn, seed, trace_out=None, svg_out=None):
    trace = scn.run(seed=seed)
    metrics = trace_io.compute_metrics(trace, scn.model, scn.scene)
    outputs = {}
    if trace_out:
        trace_io.write_trace(trace, trace_out)
        outputs["trace"] = str(trace_out)
    if svg_out:
        Path(svg_out).write_text(export_svg(trace, scn.model, scn.scene))
        outputs["svg"] = str(svg_out)
    return trace, _summary(scn, seed if seed is not None else scn.seed, trace, metrics, outputs)


def cmd_run(args):
    scn = _load(args.scenario)
    trace, summary = _run_one(scn, args.seed, args.trace, args.svg)
    print(json.dumps(summary, indent=2))
    return EXIT_OK if trace.status == "Succeeded" else EXIT_PLANNER_FAILURE


def cmd_batch(args):
    paths = sorted(Path(args.directory).glob("*.json"))
    if not paths:
        print(f"error: no scenario files in {args.directory}", file=sys.stderr)
        return EXIT_USAGE
    summaries = []
    for path in paths:
        scn = _load(path)
        for k in range(args.seeds):
            seed = scn.seed + k
            _, summary = _run_one(scn, seed)
            summaries.append(summary)
            log.info("batch: %s seed=%d -> %s", scn.name, seed, summary["status"])
    report = {
        "runs": summaries,
        "total": len(summaries),
        "succeeded": sum(1 for s in summaries if s["status"] == "Succeeded"),
    }
    Path(args.report).write_text(json.dumps(report, indent=2))
    print(f"wrote {args.report}: {report['succeeded']}/{report['total']} succeeded")
    return EXIT_OK


def cmd_oracle(args):
    scn = _load(args.scenario)
    body = forward_kinematics(scn.model, scn.q0)
    start = body.frames[scn.scene.goal.frame]
    goal = scn.scene.goal.point
    radius = scn.model.radius if isinstance(scn.model, PointRobot) else 0.0
    try:
        if args.method == "visgraph":
            result = oracles.visibility_graph_path(scn.scene, start, goal, robot_radius=radius)
        else:
            h = args.h if args.h is not None else scn.scene.bounds.diagonal / 500.0
            result = oracles.grid_path(scn.scene, start, goal, h, robot_radius=radius)
    except oracles.OracleInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if result.found:
        print(f"found=true length={result.length:.6f}")
        return EXIT_OK
    print("found=false")
    return EXIT_PLANNER_FAILURE


def cmd_serve(args):
    from coplan.bridge import serve_forever

    scn = _load(args.scenario)
    serve_forever(scn, port=args.port, rate=args.rate, snapshot_every=args.snapshot_every)
    return EXIT_OK


def cmd_replay(args):
    try:
        trace, warnings = trace_io.read_trace(args.trace)
    except FileNotFoundError:
        print(f"error: trace file not found: {args.trace}", file=sys.stderr)
        return EXIT_USAGE
    except trace_io.TraceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    if trace.scenario is None:
        print("error: trace header carries no scenario; cannot render", file=sys.stderr)
        return EXIT_USAGE
    scn = parse_scenario_dict(trace.scenario)
    Path(args.svg).write_text(export_svg(trace, scn.model, scn.scene))
    print(f"wrote {args.svg}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="coplan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario headless")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trace", default=None, help="write the trace to this path")
    p.add_argument("--svg", default=None, help="render the finished run to this path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("batch", help="run every scenario in a directory")
    p.add_argument("directory")
    p.add_argument("--seeds", type=int, default=1, help="seeds per scenario")
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_batch)

    p = sub.add_parser("oracle", help="classical-planner ground truth")
    p.add_argument("scenario")
    p.add_argument("--method", choices=("visgraph", "grid"), default="visgraph")
    p.add_argument("--h", type=float, default=None, help="grid resolution")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("serve", help="live operator session over WebSocket")
    p.add_argument("scenario")
    p.add_argument("--port", type=int, required=True)
    p.add_argument("--rate", type=float, default=50.0, help="ticks per second while running")
    p.add_argument("--snapshot-every", type=int, default=1)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("replay", help="render a recorded trace")
    p.add_argument("trace")
    p.add_argument("--svg", required=True)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None):
    logging.basicConfig(level=os.environ.get("PLANNER_LOG", "WARNING").upper())
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; normalize anything else
        raise SystemExit(EXIT_USAGE if exc.code not in (0,) else 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
