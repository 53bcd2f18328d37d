"""Regenerate the shipped scenario fixtures (deterministic)."""

import json
import math
from pathlib import Path

import numpy as np
from scipy.spatial import ConvexHull

from coplan import oracles
from coplan.scenario import parse_scenario_dict

OUT = Path(__file__).resolve().parent.parent / "fixtures"


def rect(x0, y0, x1, y1):
    return {"type": "polygon", "vertices": [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]}


def empty_march():
    return {
        "schema_version": "1",
        "name": "empty_march",
        "scene": {
            "bounds": {"xmin": 0.0, "ymin": 0.0, "xmax": 12.0, "ymax": 10.0},
            "obstacles": [],
            "goal": {"frame": "ee", "point": [10.5, 5.0], "epsilon": 1e-6},
        },
        "model": {"type": "point", "radius": 0.1, "start": [0.5, 5.0]},
        "agents": [
            {"id": "attraction", "kind": "attraction", "period": 1, "step_bound": 0.5}
        ],
        "engine": {"max_ticks": 100, "collision_guard": "hard",
                   "stall": {"window": 50, "threshold": 1e-3}},
        "seed": 1,
    }


U_SCENE = {
    "bounds": {"xmin": 0.0, "ymin": 0.0, "xmax": 12.0, "ymax": 10.0},
    "obstacles": [rect(6.0, 3.0, 6.6, 7.0), rect(3.6, 6.4, 6.6, 7.0), rect(3.6, 3.0, 6.6, 3.6)],
    "goal": {"frame": "ee", "point": [9.0, 5.0], "epsilon": 0.1},
}


def u_trap():
    return {
        "schema_version": "1",
        "name": "u_trap",
        "scene": U_SCENE,
        "model": {"type": "point", "radius": 0.0, "start": [1.5, 5.0]},
        "agents": [
            {"id": "collision", "kind": "collision", "period": 1, "step_bound": 0.3,
             "params": {"influence": 0.4, "gain": 0.05}},
            {"id": "attraction", "kind": "attraction", "period": 3, "step_bound": 0.25},
            {"id": "perturbation", "kind": "perturbation", "period": 1, "step_bound": 0.6,
             "params": {"trigger": "stall"}},
        ],
        "engine": {"max_ticks": 50000, "collision_guard": "hard",
                   "stall": {"window": 30, "threshold": 0.01}},
        "seed": 1,
    }


def u_trap_operator():
    return {
        "schema_version": "1",
        "name": "u_trap_operator",
        "scene": U_SCENE,
        "model": {"type": "point", "radius": 0.0, "start": [1.5, 5.0]},
        "agents": [
            {"id": "collision", "kind": "collision", "period": 1, "step_bound": 0.3,
             "params": {"influence": 0.4, "gain": 0.05}},
            {"id": "attraction", "kind": "attraction", "period": 3, "step_bound": 0.25},
            {"id": "operator", "kind": "operator", "period": 9, "step_bound": 2.0},
        ],
        "engine": {"max_ticks": 3000, "collision_guard": "hard",
                   "stall": {"window": 30, "threshold": 0.01}},
        "seed": 7,
        "operator_script": [
            {"tick": 53, "command": {"type": "pull", "frame": "ee", "vector": [-2.4, 1.4]}},
            {"tick": 62, "command": {"type": "pull", "frame": "ee", "vector": [0.0, 2.5]}},
        ],
    }


def manikin_default():
    return {
        "schema_version": "1",
        "name": "manikin_default",
        "scene": {
            "bounds": {"xmin": 0.0, "ymin": 0.0, "xmax": 10.0, "ymax": 8.0},
            "obstacles": [
                {"type": "circle", "center": [5.2, 2.8], "radius": 0.35},
                rect(1.0, 0.0, 9.0, 0.4),
            ],
            "goal": {"frame": "ee", "point": [6.2, 3.4], "epsilon": 0.08},
        },
        "model": {
            "type": "chain",
            "base": [4.0, 1.0],
            "link_lengths": [1.4, 1.2, 1.0],
            "link_radii": [0.12, 0.1, 0.08],
            "start": [2.4, -0.8, -0.6],
            "limits": {"lower": [0.2, -2.6, -2.6], "upper": [2.9, 2.6, 2.6]},
        },
        "agents": [
            {"id": "collision", "kind": "collision", "period": 1, "step_bound": 0.15,
             "params": {"influence": 0.3, "gain": 0.02}},
            {"id": "attraction", "kind": "attraction", "period": 3, "step_bound": 0.12},
            {"id": "operator", "kind": "operator", "period": 9, "step_bound": 0.3},
            {"id": "posture", "kind": "posture", "period": 9, "step_bound": 0.05},
        ],
        "engine": {"max_ticks": 600, "collision_guard": "hard",
                   "self_collision_guard": True,
                   "stall": {"window": 60, "threshold": 0.005}},
        "seed": 3,
    }


def _random_convex(rng, center, size):
    while True:
        pts = center + rng.uniform(-size, size, size=(12, 2))
        hull = ConvexHull(pts)
        verts = pts[hull.vertices]  # CCW per scipy convention
        if len(verts) >= 4:
            return [[round(float(x), 4), round(float(y), 4)] for x, y in verts]


def random_scene(index, rng):
    start = [0.5, 0.5]
    goal = [9.5, 9.5]
    while True:
        obstacles = []
        n_obs = int(rng.integers(4, 7))
        for _ in range(n_obs):
            center = rng.uniform(2.0, 8.0, size=2)
            size = rng.uniform(0.5, 1.1)
            obstacles.append({"type": "polygon", "vertices": _random_convex(rng, center, size)})
        scn_dict = {
            "schema_version": "1",
            "name": f"random_scene_{index}",
            "scene": {
                "bounds": {"xmin": 0.0, "ymin": 0.0, "xmax": 10.0, "ymax": 10.0},
                "obstacles": obstacles,
                "goal": {"frame": "ee", "point": goal, "epsilon": 0.05},
            },
            "model": {"type": "point", "radius": 0.0, "start": start},
            "agents": [
                {"id": "collision", "kind": "collision", "period": 1, "step_bound": 0.2,
                 "params": {"influence": 0.3, "gain": 0.03}},
                {"id": "attraction", "kind": "attraction", "period": 1, "step_bound": 0.2},
            ],
            "engine": {"max_ticks": 2000, "collision_guard": "hard",
                       "stall": {"window": 50, "threshold": 0.005}},
            "seed": 100 + index,
        }
        try:
            scn = parse_scenario_dict(scn_dict)
        except Exception:
            continue
        dists = oracles.points_scene_distance(np.array([start, goal]), scn.scene)
        if min(dists) < 0.7:
            continue
        res = oracles.visibility_graph_path(scn.scene, start, goal)
        if res.found and res.length > 12.9:  # force the path to bend around obstacles
            return scn_dict


def main():
    OUT.mkdir(exist_ok=True)
    fixtures = [empty_march(), u_trap(), u_trap_operator(), manikin_default()]
    rng = np.random.default_rng(20240817)
    for i in range(5):
        fixtures.append(random_scene(i, rng))
    for fx in fixtures:
        parse_scenario_dict(fx)  # sanity: every shipped fixture validates
        path = OUT / f"{fx['name']}.json"
        path.write_text(json.dumps(fx, indent=2) + "\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
