"""Deterministic SVG rendering of a trace: scene, trajectory, final pose."""

from coplan import kinematics
from coplan.geometry import Capsule, Circle, ConvexPolygon

_SCALE = 60.0
_MARGIN = 0.5


def _fmt(v: float) -> str:
    return f"{v:.4f}"


class _Canvas:
    def __init__(self, bounds):
        self.b = bounds
        self.parts = []

    def x(self, wx):
        return (wx - self.b.xmin + _MARGIN) * _SCALE

    def y(self, wy):
        return (self.b.ymax - wy + _MARGIN) * _SCALE

    def line(self, p, q, stroke, width=1.5, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{_fmt(self.x(p[0]))}" y1="{_fmt(self.y(p[1]))}" '
            f'x2="{_fmt(self.x(q[0]))}" y2="{_fmt(self.y(q[1]))}" '
            f'stroke="{stroke}" stroke-width="{width}"{d}/>'
        )

    def circle(self, c, r, fill, stroke="none"):
        self.parts.append(
            f'<circle cx="{_fmt(self.x(c[0]))}" cy="{_fmt(self.y(c[1]))}" '
            f'r="{_fmt(max(r, 0.02) * _SCALE)}" fill="{fill}" stroke="{stroke}"/>'
        )

    def polygon(self, verts, fill, stroke="none"):
        pts = " ".join(f"{_fmt(self.x(x))},{_fmt(self.y(y))}" for x, y in verts)
        self.parts.append(f'<polygon points="{pts}" fill="{fill}" stroke="{stroke}"/>')

    def polyline(self, verts, stroke, width=2.0):
        pts = " ".join(f"{_fmt(self.x(x))},{_fmt(self.y(y))}" for x, y in verts)
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{width}"/>'
        )

    def capsule(self, cap, fill):
        # stroke-linecap round turns a fat line into a capsule
        w = max(2.0 * cap.radius * _SCALE, 2.0)
        self.parts.append(
            f'<line x1="{_fmt(self.x(cap.a[0]))}" y1="{_fmt(self.y(cap.a[1]))}" '
            f'x2="{_fmt(self.x(cap.b[0]))}" y2="{_fmt(self.y(cap.b[1]))}" '
            f'stroke="{fill}" stroke-width="{_fmt(w)}" stroke-linecap="round"/>'
        )

    def shape(self, shape, fill):
        if isinstance(shape, Circle):
            self.circle(shape.center, shape.radius, fill)
        elif isinstance(shape, Capsule):
            self.capsule(shape, fill)
        elif isinstance(shape, ConvexPolygon):
            self.polygon(shape.vertices, fill)

    def document(self):
        w = _fmt((self.b.xmax - self.b.xmin + 2 * _MARGIN) * _SCALE)
        h = _fmt((self.b.ymax - self.b.ymin + 2 * _MARGIN) * _SCALE)
        body = "\n".join(self.parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
            f'viewBox="0 0 {w} {h}">\n{body}\n</svg>\n'
        )


def export_svg(trace, model, scene) -> str:
    """Render a finished trace to an SVG document (byte-deterministic)."""
    cv = _Canvas(scene.bounds)
    b = scene.bounds
    cv.polygon(
        [(b.xmin, b.ymin), (b.xmax, b.ymin), (b.xmax, b.ymax), (b.xmin, b.ymax)],
        fill="#fbfbf8", stroke="#444444",
    )
    for ob in scene.obstacles:
        cv.shape(ob, "#8090a0")
    goal_frame = scene.goal.frame
    qs = [trace.q0] + [r.q for r in trace.records]
    points = [kinematics.forward_kinematics(model, q).frames[goal_frame] for q in qs]
    cv.polyline(points, "#d07020")
    final_body = kinematics.forward_kinematics(model, qs[-1])
    for shape in final_body.shapes:
        cv.shape(shape, "#3070c0")
    cv.circle(points[0], 0.06, "#208020")
    cv.circle(scene.goal.point, 0.06, "#c02020")
    return cv.document()
