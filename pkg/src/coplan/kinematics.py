"""Kinematic models and their workspace embeddings.

Three model families share one interface: a configuration vector q maps to
workspace shapes plus named frame points, and every frame (or arbitrary
attached point) has an analytic 2xn Jacobian. Angles are unwrapped reals;
joint limits enforce range.
"""

import math
from dataclasses import dataclass

import numpy as np

from coplan import kernels
from coplan.geometry import Capsule, Circle, ConvexPolygon


class KinematicsError(ValueError):
    pass


@dataclass(frozen=True)
class JointLimits:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise KinematicsError("joint limit vectors must be 1-D and equal length")
        if not np.all(np.isfinite(lo)) or not np.all(np.isfinite(hi)):
            raise KinematicsError("joint limits must be finite")
        if not np.all(lo < hi):
            raise KinematicsError("each lower limit must be < its upper limit")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def mid(self):
        return 0.5 * (self.lower + self.upper)

    @property
    def range(self):
        return self.upper - self.lower

    def clamp(self, q):
        return np.clip(q, self.lower, self.upper)


@dataclass(frozen=True)
class EmbeddedBody:
    shapes: tuple
    frames: dict


class PointRobot:
    """Disc (or point, radius 0) translating in the plane; q = (x, y)."""

    def __init__(self, radius, limits: JointLimits):
        if not (math.isfinite(radius) and radius >= 0.0):
            raise KinematicsError(f"point robot radius must be >= 0, got {radius}")
        if limits.lower.shape[0] != 2:
            raise KinematicsError("point robot limits must have dimension 2")
        self.radius = radius
        self.limits = limits
        self.dim = 2
        self.frame_ids = ("ee",)


class RigidPolygon:
    """Rigid convex polygon; q = (x, y, theta); local origin is the reference."""

    def __init__(self, local_vertices, limits: JointLimits):
        self.local = ConvexPolygon(local_vertices).vertices
        if limits.lower.shape[0] != 3:
            raise KinematicsError("rigid polygon limits must have dimension 3")
        self.limits = limits
        self.dim = 3
        self.frame_ids = ("ee",)


class PlanarChain:
    """Serial revolute chain with capsule links; q = joint angles."""

    def __init__(self, base, link_lengths, link_radii, limits: JointLimits):
        lengths = np.asarray(link_lengths, dtype=float)
        radii = np.asarray(link_radii, dtype=float)
        if lengths.ndim != 1 or lengths.shape != radii.shape:
            raise KinematicsError("link_lengths and link_radii must match")
        if not np.all(lengths > 0.0):
            raise KinematicsError("all link lengths must be > 0")
        if not np.all(radii >= 0.0):
            raise KinematicsError("link radii must be >= 0")
        if limits.lower.shape[0] != lengths.shape[0]:
            raise KinematicsError("limits dimension must equal link count")
        lengths.setflags(write=False)
        radii.setflags(write=False)
        self.base = (float(base[0]), float(base[1]))
        self.link_lengths = lengths
        self.link_radii = radii
        self.limits = limits
        self.dim = lengths.shape[0]
        self.frame_ids = ("ee", "head")


KinematicModel = PointRobot | RigidPolygon | PlanarChain


def _check_q(model, q):
    q = np.asarray(q, dtype=float)
    if q.shape != (model.dim,):
        raise KinematicsError(f"configuration has shape {q.shape}, expected ({model.dim},)")
    return q


def forward_kinematics(model: KinematicModel, q) -> EmbeddedBody:
    q = _check_q(model, q)
    if isinstance(model, PointRobot):
        p = (q[0], q[1])
        return EmbeddedBody((Circle(p, model.radius),), {"ee": p})
    if isinstance(model, RigidPolygon):
        c, s = math.cos(q[2]), math.sin(q[2])
        verts = np.empty_like(model.local)
        verts[:, 0] = q[0] + c * model.local[:, 0] - s * model.local[:, 1]
        verts[:, 1] = q[1] + s * model.local[:, 0] + c * model.local[:, 1]
        return EmbeddedBody((ConvexPolygon(verts),), {"ee": (q[0], q[1])})
    pts = kernels.chain_points(model.base[0], model.base[1], model.link_lengths, q)
    shapes = tuple(
        Capsule(
            (pts[k, 0], pts[k, 1]),
            (pts[k + 1, 0], pts[k + 1, 1]),
            model.link_radii[k],
        )
        for k in range(model.dim)
    )
    n = model.dim
    frames = {
        "ee": (pts[n, 0], pts[n, 1]),
        "head": (0.5 * (pts[n - 1, 0] + pts[n, 0]), 0.5 * (pts[n - 1, 1] + pts[n, 1])),
    }
    return EmbeddedBody(shapes, frames)


def _chain_point_jacobian(model: PlanarChain, q, link, point):
    pts = kernels.chain_points(model.base[0], model.base[1], model.link_lengths, q)
    jac = np.zeros((2, model.dim))
    for j in range(link + 1):
        rx = point[0] - pts[j, 0]
        ry = point[1] - pts[j, 1]
        jac[0, j] = -ry
        jac[1, j] = rx
    return jac


def jacobian(model: KinematicModel, q, frame: str):
    """Analytic 2xn Jacobian of the named frame point w.r.t. q."""
    q = _check_q(model, q)
    if frame not in model.frame_ids:
        raise KinematicsError(f"unknown frame {frame!r}")
    if isinstance(model, PointRobot):
        return np.eye(2)
    if isinstance(model, RigidPolygon):
        # Reference frame sits at the local origin: no lever arm.
        return np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    body = forward_kinematics(model, q)
    link = model.dim - 1
    return _chain_point_jacobian(model, q, link, body.frames[frame])


def point_jacobian(model: KinematicModel, q, body_shape_index: int, point):
    """Jacobian of an arbitrary point rigidly attached to one body shape."""
    q = _check_q(model, q)
    if isinstance(model, PointRobot):
        return np.eye(2)
    if isinstance(model, RigidPolygon):
        rx = point[0] - q[0]
        ry = point[1] - q[1]
        return np.array([[1.0, 0.0, -ry], [0.0, 1.0, rx]])
    return _chain_point_jacobian(model, q, body_shape_index, point)


def self_clearance(model: KinematicModel, body: EmbeddedBody) -> float:
    """Minimum distance between non-adjacent chain links; inf for other models."""
    if not isinstance(model, PlanarChain) or model.dim < 3:
        return math.inf
    best = math.inf
    shapes = body.shapes
    for i in range(len(shapes)):
        for j in range(i + 2, len(shapes)):
            a, b = shapes[i], shapes[j]
            d, *_ = kernels.seg_seg(
                a.a[0], a.a[1], a.b[0], a.b[1], b.a[0], b.a[1], b.b[0], b.b[1]
            )
            d -= a.radius + b.radius
            if d < best:
                best = d
    return best


def total_reach(model: PlanarChain) -> float:
    return float(np.sum(model.link_lengths))
