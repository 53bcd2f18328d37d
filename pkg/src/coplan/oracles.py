"""Classical planners used as ground truth.

- Exact visibility-graph shortest paths (point robot, polygonal obstacles;
  disc robots are handled by miter-inflated polygons, which over-approximates
  the blocked set and therefore upper-bounds the true optimal length).
- Grid Dijkstra over an 8-connected free-cell lattice: the universal
  brute-force fallback for any model or obstacle mix.
- Pure potential descent (attraction + repulsion every iteration, no
  scheduling, no perturbation, no operator): the baseline that exhibits the
  local-minimum failure the multi-agent roster exists to escape.
"""

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from coplan import agents as agents_mod
from coplan import engine as engine_mod
from coplan.geometry import Capsule, Circle, ConvexPolygon, Scene, line_of_sight
from coplan.kinematics import PointRobot


class OracleInputError(ValueError):
    pass


@dataclass(frozen=True)
class Polyline:
    vertices: tuple

    @property
    def length(self) -> float:
        total = 0.0
        for (x0, y0), (x1, y1) in zip(self.vertices, self.vertices[1:]):
            total += math.hypot(x1 - x0, y1 - y0)
        return total


@dataclass(frozen=True)
class OracleResult:
    found: bool
    path: Polyline | None

    @property
    def length(self):
        return self.path.length if self.path is not None else None


def _offset_polygon(poly: ConvexPolygon, r: float) -> ConvexPolygon:
    """Miter-inflate a CCW convex polygon by r (outward edge offset)."""
    v = poly.vertices
    m = len(v)
    lines = []
    for i in range(m):
        j = (i + 1) % m
        dx = v[j, 0] - v[i, 0]
        dy = v[j, 1] - v[i, 1]
        ln = math.hypot(dx, dy)
        nx, ny = dy / ln, -dx / ln   # outward for CCW
        lines.append((v[i, 0] + r * nx, v[i, 1] + r * ny, dx, dy))
    out = []
    for i in range(m):
        px, py, dx1, dy1 = lines[i - 1]
        qx, qy, dx2, dy2 = lines[i]
        denom = dx1 * dy2 - dy1 * dx2
        t = ((qx - px) * dy2 - (qy - py) * dx2) / denom
        out.append((px + t * dx1, py + t * dy1))
    return ConvexPolygon(out)


def _point_clear(p, scene: Scene) -> bool:
    for ob in scene.obstacles:
        d, *_ = (
            _poly_point_d(ob, p) if isinstance(ob, ConvexPolygon) else _round_point_d(ob, p)
        )
        if d < 0.0:
            return False
    return True


def _poly_point_d(poly, p):
    from coplan import kernels

    return kernels.poly_point(poly.vertices, p[0], p[1])


def _round_point_d(ob, p):
    from coplan import kernels

    if isinstance(ob, Circle):
        return (math.hypot(p[0] - ob.center[0], p[1] - ob.center[1]) - ob.radius, 0, 0)
    d, _, _ = kernels.point_seg(p[0], p[1], ob.a[0], ob.a[1], ob.b[0], ob.b[1])
    return (d - ob.radius, 0, 0)


def visibility_graph_path(scene: Scene, start, goal, robot_radius: float = 0.0) -> OracleResult:
    """Exact Euclidean shortest path among polygonal obstacles.

    robot_radius > 0 inflates the polygons first; the reported length is then
    an upper bound on the true disc-robot optimum (miter corners over-block).
    """
    for ob in scene.obstacles:
        if not isinstance(ob, ConvexPolygon):
            raise OracleInputError("visibility graph supports polygonal obstacles only")
    obstacles = tuple(
        _offset_polygon(ob, robot_radius) if robot_radius > 0.0 else ob
        for ob in scene.obstacles
    )
    work = Scene(scene.bounds, obstacles, scene.goal)
    for label, p in (("start", start), ("goal", goal)):
        if not _point_clear(p, work):
            raise OracleInputError(f"{label} lies inside an (inflated) obstacle")
    nodes = [tuple(start), tuple(goal)]
    for ob in obstacles:
        for vx, vy in ob.vertices:
            p = (float(vx), float(vy))
            # A vertex buried inside another obstacle is useless as a waypoint.
            if all(_poly_point_d(other, p)[0] >= -1e-12 for other in obstacles if other is not ob):
                nodes.append(p)
    n = len(nodes)
    adj = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if line_of_sight(nodes[i], nodes[j], work):
                w = math.hypot(nodes[j][0] - nodes[i][0], nodes[j][1] - nodes[i][1])
                adj[i].append((j, w))
                adj[j].append((i, w))
    dist = [math.inf] * n
    prev = [-1] * n
    dist[0] = 0.0
    heap = [(0.0, 0)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        if u == 1:
            break
        for v, w in adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                prev[v] = u
                heapq.heappush(heap, (nd, v))
    if not math.isfinite(dist[1]):
        return OracleResult(False, None)
    path = []
    u = 1
    while u != -1:
        path.append(nodes[u])
        u = prev[u]
    return OracleResult(True, Polyline(tuple(reversed(path))))


def points_scene_distance(points, scene: Scene):
    """Vectorized signed distance from an (N, 2) point array to the obstacle set."""
    pts = np.asarray(points, dtype=float)
    best = np.full(pts.shape[0], np.inf)
    for ob in scene.obstacles:
        if isinstance(ob, Circle):
            d = np.hypot(pts[:, 0] - ob.center[0], pts[:, 1] - ob.center[1]) - ob.radius
        elif isinstance(ob, Capsule):
            d = _points_seg_distance(pts, ob.a, ob.b) - ob.radius
        else:
            d = _points_poly_distance(pts, ob.vertices)
        best = np.minimum(best, d)
    return best


def _points_seg_distance(pts, a, b):
    ux, uy = b[0] - a[0], b[1] - a[1]
    denom = ux * ux + uy * uy
    if denom <= 0.0:
        return np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1])
    t = np.clip(((pts[:, 0] - a[0]) * ux + (pts[:, 1] - a[1]) * uy) / denom, 0.0, 1.0)
    return np.hypot(pts[:, 0] - (a[0] + t * ux), pts[:, 1] - (a[1] + t * uy))


def _points_poly_distance(pts, verts):
    m = len(verts)
    edge_d = np.full(pts.shape[0], np.inf)
    inside_depth = np.full(pts.shape[0], np.inf)
    for i in range(m):
        j = (i + 1) % m
        a, b = verts[i], verts[j]
        edge_d = np.minimum(edge_d, _points_seg_distance(pts, a, b))
        ex, ey = b[0] - a[0], b[1] - a[1]
        ln = math.hypot(ex, ey)
        depth = (ex * (pts[:, 1] - a[1]) - ey * (pts[:, 0] - a[0])) / ln
        inside_depth = np.minimum(inside_depth, depth)
    return np.where(inside_depth > 0.0, -edge_d, edge_d)


def grid_path(scene: Scene, start, goal, resolution: float, robot_radius: float = 0.0) -> OracleResult:
    """8-connected Dijkstra over free cell centers (diagonal cost sqrt(2)*h)."""
    if not resolution > 0.0:
        raise OracleInputError("resolution must be > 0")
    b = scene.bounds
    h = resolution
    nx = max(int(math.ceil((b.xmax - b.xmin) / h)), 1)
    ny = max(int(math.ceil((b.ymax - b.ymin) / h)), 1)
    xs = b.xmin + (np.arange(nx) + 0.5) * h
    ys = b.ymin + (np.arange(ny) + 0.5) * h
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    centers = np.column_stack([gx.ravel(), gy.ravel()])
    free = points_scene_distance(centers, scene) >= robot_radius
    free = free.reshape(nx, ny)

    def cell_of(p):
        i = int((p[0] - b.xmin) / h)
        j = int((p[1] - b.ymin) / h)
        i = min(max(i, 0), nx - 1)
        j = min(max(j, 0), ny - 1)
        if free[i, j]:
            return i, j
        # snap to the nearest free cell in a small neighborhood
        best = None
        for di in range(-2, 3):
            for dj in range(-2, 3):
                ii, jj = i + di, j + dj
                if 0 <= ii < nx and 0 <= jj < ny and free[ii, jj]:
                    d2 = di * di + dj * dj
                    if best is None or d2 < best[0]:
                        best = (d2, ii, jj)
        return (best[1], best[2]) if best else None

    sc = cell_of(start)
    tc = cell_of(goal)
    if sc is None or tc is None:
        return OracleResult(False, None)

    idx = np.arange(nx * ny).reshape(nx, ny)
    rows, cols, data = [], [], []
    for di, dj, cost in (
        (1, 0, h), (0, 1, h), (1, 1, math.sqrt(2.0) * h), (1, -1, math.sqrt(2.0) * h),
    ):
        src_i = slice(max(0, -di), nx - max(0, di))
        src_j = slice(max(0, -dj), ny - max(0, dj))
        dst_i = slice(max(0, di), nx - max(0, -di))
        dst_j = slice(max(0, dj), ny - max(0, -dj))
        ok = free[src_i, src_j] & free[dst_i, dst_j]
        rows.append(idx[src_i, src_j][ok])
        cols.append(idx[dst_i, dst_j][ok])
        data.append(np.full(int(ok.sum()), cost))
    graph = coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(nx * ny, nx * ny),
    ).tocsr()
    source = int(idx[sc])
    target = int(idx[tc])
    dist, pred = _csgraph_dijkstra(
        graph, directed=False, indices=source, return_predecessors=True
    )
    if not math.isfinite(dist[target]):
        return OracleResult(False, None)
    cells = []
    u = target
    while u != -9999 and u != source:
        cells.append(u)
        u = int(pred[u])
    cells.append(source)
    cells.reverse()
    path = [(float(centers[c, 0]), float(centers[c, 1])) for c in cells]
    # include the true endpoints so the reported length is endpoint-exact
    if tuple(start) != path[0]:
        path.insert(0, (float(start[0]), float(start[1])))
    if tuple(goal) != path[-1]:
        path.append((float(goal[0]), float(goal[1])))
    return OracleResult(True, Polyline(tuple(path)))


def potential_descent_run(
    scene: Scene,
    model,
    q0,
    step_bound: float,
    max_iters: int,
    influence: float = 0.5,
    gain: float = 1.0,
    stall_window: int = 100,
    stall_threshold: float = 1e-4,
) -> engine_mod.Trace:
    """Single-loop attraction+repulsion descent; stops on goal, stall, or budget."""
    specs = [
        engine_mod.AgentSpec(
            id="collision", kind=agents_mod.COLLISION,
            params=agents_mod.CollisionParams(influence=influence, gain=gain),
            period=1, step_bound=step_bound,
        ),
        engine_mod.AgentSpec(
            id="attraction", kind=agents_mod.ATTRACTION,
            params=agents_mod.AttractionParams(),
            period=1, step_bound=step_bound,
        ),
    ]
    config = engine_mod.EngineConfig(
        max_ticks=max_iters,
        stall_window=stall_window,
        stall_threshold=stall_threshold,
    )
    eng = engine_mod.Engine(model, scene, specs, config, seed=0, q0=q0)
    q0_t = tuple(float(v) for v in eng.q)
    while eng.status == engine_mod.RUNNING:
        if eng.stalled:
            eng.status = engine_mod.FAILED_STALL
            break
        eng.step()
    return engine_mod.Trace(seed=0, q0=q0_t, status=eng.status, records=eng.records)
