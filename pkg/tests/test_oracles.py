"""Classical planner oracles: exact cases, consistency, descent baseline."""

import math

import numpy as np
import pytest

from conftest import FIXTURES
from coplan import oracles
from coplan.geometry import Bounds, Circle, ConvexPolygon, Goal, Scene
from coplan.scenario import load_scenario


def make_scene(obstacles, bounds=(0, 0, 10, 10), goal=(9.0, 9.0)):
    return Scene(
        Bounds(*bounds), tuple(obstacles), Goal("ee", goal, 0.1)
    )


SQUARE_OBS = ConvexPolygon([[4.0, 4.0], [6.0, 4.0], [6.0, 6.0], [4.0, 6.0]])


class TestVisibilityGraph:
    def test_empty_scene_is_straight_line(self):
        res = oracles.visibility_graph_path(make_scene([]), (1, 1), (9, 9))
        assert res.found
        assert res.length == pytest.approx(math.hypot(8, 8))
        assert res.path.vertices == ((1, 1), (9, 9))

    def test_detour_around_square_hand_computed(self):
        # start/goal level with the square center: shortest path kinks at one
        # corner pair; by symmetry length = 2*sqrt(2^2+1^2) + 2
        scene = make_scene([SQUARE_OBS])
        res = oracles.visibility_graph_path(scene, (2.0, 5.0), (8.0, 5.0))
        assert res.found
        expected = 2.0 * math.hypot(2.0, 1.0) + 2.0
        assert res.length == pytest.approx(expected, abs=1e-12)

    def test_path_vertices_are_mutually_visible(self):
        scene = make_scene([SQUARE_OBS])
        res = oracles.visibility_graph_path(scene, (1.0, 1.0), (9.0, 9.0))
        from coplan.geometry import line_of_sight

        for a, b in zip(res.path.vertices, res.path.vertices[1:]):
            assert line_of_sight(a, b, scene)

    def test_unreachable_reports_not_found(self):
        # box the start in completely; the walls overlap so no corner seam
        # offers a grazing line out
        walls = [
            ConvexPolygon([[0.5, 0.5], [3.0, 0.5], [3.0, 1.0], [0.5, 1.0]]),
            ConvexPolygon([[0.5, 2.5], [3.0, 2.5], [3.0, 3.0], [0.5, 3.0]]),
            ConvexPolygon([[0.5, 0.9], [1.0, 0.9], [1.0, 2.6], [0.5, 2.6]]),
            ConvexPolygon([[2.5, 0.9], [3.0, 0.9], [3.0, 2.6], [2.5, 2.6]]),
        ]
        res = oracles.visibility_graph_path(make_scene(walls), (1.75, 1.75), (9.0, 9.0))
        assert not res.found
        assert res.length is None

    def test_rejects_round_obstacles(self):
        with pytest.raises(oracles.OracleInputError):
            oracles.visibility_graph_path(make_scene([Circle((5, 5), 1.0)]), (1, 1), (9, 9))

    def test_rejects_buried_start(self):
        with pytest.raises(oracles.OracleInputError):
            oracles.visibility_graph_path(make_scene([SQUARE_OBS]), (5.0, 5.0), (9, 9))

    def test_disc_inflation_lengthens_path(self):
        scene = make_scene([SQUARE_OBS])
        r0 = oracles.visibility_graph_path(scene, (2.0, 5.0), (8.0, 5.0), robot_radius=0.0)
        r1 = oracles.visibility_graph_path(scene, (2.0, 5.0), (8.0, 5.0), robot_radius=0.3)
        assert r1.length > r0.length

    def test_offset_polygon_grows_outward(self):
        inflated = oracles._offset_polygon(SQUARE_OBS, 0.5)
        assert np.allclose(
            sorted(map(tuple, inflated.vertices.tolist())),
            sorted([(3.5, 3.5), (6.5, 3.5), (6.5, 6.5), (3.5, 6.5)]),
        )


class TestGridPath:
    def test_empty_scene_close_to_euclidean(self):
        scene = make_scene([])
        res = oracles.grid_path(scene, (1.0, 1.0), (9.0, 9.0), 0.05)
        straight = math.hypot(8, 8)
        assert res.found
        assert straight <= res.length <= 1.09 * straight

    def test_grid_never_beats_visgraph(self):
        scene = make_scene([SQUARE_OBS])
        vis = oracles.visibility_graph_path(scene, (2.0, 5.0), (8.0, 5.0))
        grid = oracles.grid_path(scene, (2.0, 5.0), (8.0, 5.0), 0.05)
        assert grid.found
        assert vis.length <= grid.length <= 1.09 * vis.length

    def test_refinement_improves_length(self):
        scene = make_scene([SQUARE_OBS])
        coarse = oracles.grid_path(scene, (2.0, 5.0), (8.0, 5.0), 0.4)
        fine = oracles.grid_path(scene, (2.0, 5.0), (8.0, 5.0), 0.05)
        assert fine.length <= coarse.length + 1e-9

    def test_unreachable_goal(self):
        walls = [
            ConvexPolygon([[0.2, 0.2], [3.0, 0.2], [3.0, 1.0], [0.2, 1.0]]),
            ConvexPolygon([[0.2, 2.5], [3.0, 2.5], [3.0, 3.2], [0.2, 3.2]]),
            ConvexPolygon([[0.2, 1.0], [1.0, 1.0], [1.0, 2.5], [0.2, 2.5]]),
            ConvexPolygon([[2.5, 1.0], [3.2, 1.0], [3.2, 2.5], [2.5, 2.5]]),
        ]
        res = oracles.grid_path(make_scene(walls), (1.75, 1.75), (9.0, 9.0), 0.1)
        assert not res.found

    def test_works_with_round_obstacles(self):
        scene = make_scene([Circle((5, 5), 1.5)])
        res = oracles.grid_path(scene, (1.0, 5.0), (9.0, 5.0), 0.05)
        assert res.found
        assert res.length > 8.0

    def test_endpoints_are_exact(self):
        scene = make_scene([])
        res = oracles.grid_path(scene, (1.03, 1.07), (8.91, 8.99), 0.25)
        assert res.path.vertices[0] == (1.03, 1.07)
        assert res.path.vertices[-1] == (8.91, 8.99)

    def test_rejects_bad_resolution(self):
        with pytest.raises(oracles.OracleInputError):
            oracles.grid_path(make_scene([]), (1, 1), (9, 9), 0.0)

    def test_shipped_random_scenes_consistent(self):
        for i in range(5):
            scn = load_scenario(FIXTURES / f"random_scene_{i}.json")
            start = tuple(scn.canonical["model"]["start"])
            goal = tuple(scn.canonical["scene"]["goal"]["point"])
            h = scn.scene.bounds.diagonal / 500.0
            vis = oracles.visibility_graph_path(scn.scene, start, goal)
            grid = oracles.grid_path(scn.scene, start, goal, h)
            assert vis.found and grid.found
            assert vis.length <= grid.length <= 1.09 * vis.length


class TestPotentialDescent:
    def test_succeeds_in_open_scene(self):
        scene = make_scene([Circle((5.0, 4.0), 1.0)], goal=(9.0, 9.0))
        from coplan.kinematics import JointLimits, PointRobot

        model = PointRobot(0.0, JointLimits(np.zeros(2), np.array([10.0, 10.0])))
        trace = oracles.potential_descent_run(
            scene, model, (1.0, 1.0), step_bound=0.25, max_iters=500
        )
        assert trace.status == "Succeeded"

    def test_stalls_in_u_trap(self):
        scn = load_scenario(FIXTURES / "u_trap.json")
        trace = oracles.potential_descent_run(
            scn.scene, scn.model, scn.q0,
            step_bound=0.25, max_iters=10000, influence=0.4, gain=0.05,
        )
        assert trace.status == "FailedStall"
        # stuck in front of the cavity mouth, nowhere near the goal
        assert trace.records[-1].goal_distance > 2.0


class TestPolyline:
    def test_length_sums_segments(self):
        p = oracles.Polyline(((0.0, 0.0), (3.0, 4.0), (3.0, 10.0)))
        assert p.length == pytest.approx(11.0)

    def test_single_vertex_has_zero_length(self):
        assert oracles.Polyline(((1.0, 2.0),)).length == 0.0
