"""Workspace geometry: shapes, scenes, signed distances, line of sight.

All distances are signed (negative = penetration) and every query reports
witness points, which downstream agents turn into push directions.
Boundary convention: touching (distance exactly 0) is not penetration, and
a sight line grazing an obstacle boundary is still visible.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from coplan import kernels

_INTERIOR_TOL = 1e-9


class GeometryError(ValueError):
    pass


def _check_finite(arr, what):
    a = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(a)):
        raise GeometryError(f"{what} must be finite, got {arr!r}")
    return a


@dataclass(frozen=True)
class Circle:
    center: tuple[float, float]
    radius: float

    def __post_init__(self):
        _check_finite(self.center, "circle center")
        if not (math.isfinite(self.radius) and self.radius >= 0.0):
            raise GeometryError(f"circle radius must be >= 0, got {self.radius}")


@dataclass(frozen=True)
class Capsule:
    a: tuple[float, float]
    b: tuple[float, float]
    radius: float

    def __post_init__(self):
        _check_finite(self.a, "capsule endpoint")
        _check_finite(self.b, "capsule endpoint")
        if not (math.isfinite(self.radius) and self.radius >= 0.0):
            raise GeometryError(f"capsule radius must be >= 0, got {self.radius}")


class ConvexPolygon:
    """Strictly convex polygon, vertices CCW. Stored as an (m, 2) array."""

    __slots__ = ("vertices",)

    def __init__(self, vertices):
        v = _check_finite(vertices, "polygon vertices")
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise GeometryError("polygon needs at least 3 (x, y) vertices")
        m = v.shape[0]
        for i in range(m):
            p0 = v[i]
            p1 = v[(i + 1) % m]
            p2 = v[(i + 2) % m]
            cross = (p1[0] - p0[0]) * (p2[1] - p1[1]) - (p1[1] - p0[1]) * (p2[0] - p1[0])
            if cross <= 0.0:
                raise GeometryError(
                    f"polygon vertices must be CCW and strictly convex (vertex {i})"
                )
        v.setflags(write=False)
        self.vertices = v

    def __eq__(self, other):
        return isinstance(other, ConvexPolygon) and np.array_equal(
            self.vertices, other.vertices
        )

    def __hash__(self):
        return hash(self.vertices.tobytes())

    def __repr__(self):
        return f"ConvexPolygon({self.vertices.tolist()})"


Shape = Circle | Capsule | ConvexPolygon


@dataclass(frozen=True)
class Bounds:
    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        _check_finite((self.xmin, self.ymin, self.xmax, self.ymax), "bounds")
        if self.xmin >= self.xmax or self.ymin >= self.ymax:
            raise GeometryError("bounds must have positive extent")

    @property
    def diagonal(self):
        return math.hypot(self.xmax - self.xmin, self.ymax - self.ymin)

    def contains(self, p):
        return self.xmin <= p[0] <= self.xmax and self.ymin <= p[1] <= self.ymax


@dataclass(frozen=True)
class Goal:
    frame: str
    point: tuple[float, float]
    epsilon: float

    def __post_init__(self):
        _check_finite(self.point, "goal point")
        if not self.epsilon > 0.0:
            raise GeometryError(f"goal epsilon must be > 0, got {self.epsilon}")


@dataclass(frozen=True)
class Scene:
    bounds: Bounds
    obstacles: tuple
    goal: Goal

    def __post_init__(self):
        if not self.bounds.contains(self.goal.point):
            raise GeometryError("goal point outside scene bounds")
        for i, ob in enumerate(self.obstacles):
            if isinstance(ob, Circle) and ob.radius <= 0.0:
                raise GeometryError(f"obstacle {i}: circle radius must be > 0")


@dataclass(frozen=True)
class ClearanceReport:
    min_distance: float
    body_point: tuple[float, float]
    obstacle_point: tuple[float, float]
    body_shape_index: int
    obstacle_index: int


_NO_OBSTACLE = ClearanceReport(math.inf, (0.0, 0.0), (0.0, 0.0), -1, -1)


def _circle_circle(a: Circle, b: Circle):
    dx = b.center[0] - a.center[0]
    dy = b.center[1] - a.center[1]
    dc = math.hypot(dx, dy)
    if dc > 0.0:
        ux, uy = dx / dc, dy / dc
    else:
        ux, uy = 1.0, 0.0
    d = dc - a.radius - b.radius
    wa = (a.center[0] + a.radius * ux, a.center[1] + a.radius * uy)
    wb = (b.center[0] - b.radius * ux, b.center[1] - b.radius * uy)
    return d, wa, wb


def _capsule_circle(a: Capsule, b: Circle):
    dc, wx, wy = kernels.point_seg(b.center[0], b.center[1], a.a[0], a.a[1], a.b[0], a.b[1])
    if dc > 0.0:
        ux, uy = (b.center[0] - wx) / dc, (b.center[1] - wy) / dc
    else:
        ux, uy = 1.0, 0.0
    d = dc - a.radius - b.radius
    wa = (wx + a.radius * ux, wy + a.radius * uy)
    wb = (b.center[0] - b.radius * ux, b.center[1] - b.radius * uy)
    return d, wa, wb


def _capsule_capsule(a: Capsule, b: Capsule):
    dc, px, py, qx, qy = kernels.seg_seg(
        a.a[0], a.a[1], a.b[0], a.b[1], b.a[0], b.a[1], b.b[0], b.b[1]
    )
    if dc > 0.0:
        ux, uy = (qx - px) / dc, (qy - py) / dc
    else:
        ux, uy = 1.0, 0.0
    d = dc - a.radius - b.radius
    return d, (px + a.radius * ux, py + a.radius * uy), (qx - b.radius * ux, qy - b.radius * uy)


def _circle_poly(a: Circle, b: ConvexPolygon):
    dc, wx, wy = kernels.poly_point(b.vertices, a.center[0], a.center[1])
    vx = wx - a.center[0]
    vy = wy - a.center[1]
    vn = math.hypot(vx, vy)
    if vn > 0.0:
        ux, uy = vx / vn, vy / vn
    else:
        ux, uy = 1.0, 0.0
    d = dc - a.radius
    return d, (a.center[0] + a.radius * ux, a.center[1] + a.radius * uy), (wx, wy)


def _capsule_poly(a: Capsule, b: ConvexPolygon):
    dc, sx, sy, wx, wy = kernels.poly_seg(b.vertices, a.a[0], a.a[1], a.b[0], a.b[1])
    vx = wx - sx
    vy = wy - sy
    vn = math.hypot(vx, vy)
    if vn > 0.0:
        ux, uy = vx / vn, vy / vn
    else:
        ux, uy = 1.0, 0.0
    d = dc - a.radius
    return d, (sx + a.radius * ux, sy + a.radius * uy), (wx, wy)


def shape_distance(a: Shape, b: Shape):
    """Signed distance between two shapes: (d, witness_on_a, witness_on_b)."""
    if isinstance(a, Circle):
        if isinstance(b, Circle):
            return _circle_circle(a, b)
        if isinstance(b, Capsule):
            d, wb, wa = _capsule_circle(b, a)
            return d, wa, wb
        return _circle_poly(a, b)
    if isinstance(a, Capsule):
        if isinstance(b, Circle):
            return _capsule_circle(a, b)
        if isinstance(b, Capsule):
            return _capsule_capsule(a, b)
        return _capsule_poly(a, b)
    if isinstance(b, Circle):
        d, wb, wa = _circle_poly(b, a)
        return d, wa, wb
    if isinstance(b, Capsule):
        d, wb, wa = _capsule_poly(b, a)
        return d, wa, wb
    d, wax, way, wbx, wby = kernels.poly_poly(a.vertices, b.vertices)
    return d, (wax, way), (wbx, wby)


def clearance(body_shapes, scene: Scene) -> ClearanceReport:
    """Minimum signed distance between any body shape and any obstacle."""
    best = _NO_OBSTACLE
    for i, bs in enumerate(body_shapes):
        for j, ob in enumerate(scene.obstacles):
            d, wa, wb = shape_distance(bs, ob)
            if d < best.min_distance:
                best = ClearanceReport(d, wa, wb, i, j)
    return best


def line_of_sight(p, q, scene: Scene) -> bool:
    """True iff the open segment pq misses every obstacle interior."""
    px, py = p
    qx, qy = q
    for ob in scene.obstacles:
        if isinstance(ob, Circle):
            d, _, _ = kernels.point_seg(ob.center[0], ob.center[1], px, py, qx, qy)
            if d < ob.radius - _INTERIOR_TOL:
                return False
        elif isinstance(ob, Capsule):
            d, *_ = kernels.seg_seg(px, py, qx, qy, ob.a[0], ob.a[1], ob.b[0], ob.b[1])
            if d < ob.radius - _INTERIOR_TOL:
                return False
        else:
            d, *_ = kernels.poly_seg(ob.vertices, px, py, qx, qy)
            if d < -_INTERIOR_TOL:
                return False
    return True
