"""Pure-Python geometric kernels.

Same call surface as the compiled module ``coplan._kernels_c``; used as the
fallback when the extension is unavailable (or when COPLAN_PURE_PYTHON=1).

Conventions:
  - polygons are (m, 2) float arrays, vertices ordered CCW, strictly convex
  - distances are signed: negative means penetration
  - every distance function also returns witness points (one per operand)
"""

import math

import numpy as np

_TERNARY_ITERS = 100


def chain_points(base_x, base_y, lengths, q):
    """Joint positions of a planar serial chain, (n+1, 2) including base."""
    n = len(lengths)
    pts = np.empty((n + 1, 2))
    pts[0, 0] = base_x
    pts[0, 1] = base_y
    ang = 0.0
    x, y = base_x, base_y
    for i in range(n):
        ang += q[i]
        x += lengths[i] * math.cos(ang)
        y += lengths[i] * math.sin(ang)
        pts[i + 1, 0] = x
        pts[i + 1, 1] = y
    return pts


def point_seg(px, py, ax, ay, bx, by):
    """Distance from point to segment; returns (d, wx, wy) with w on the segment."""
    ux = bx - ax
    uy = by - ay
    denom = ux * ux + uy * uy
    if denom <= 0.0:
        t = 0.0
    else:
        t = ((px - ax) * ux + (py - ay) * uy) / denom
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
    wx = ax + t * ux
    wy = ay + t * uy
    return math.hypot(px - wx, py - wy), wx, wy


def seg_seg(ax, ay, bx, by, cx, cy, dx, dy):
    """Closest points between segments AB and CD.

    Returns (d, px, py, qx, qy) with p on AB and q on CD.
    """
    # Ericson-style clamped closest point computation.
    d1x = bx - ax
    d1y = by - ay
    d2x = dx - cx
    d2y = dy - cy
    rx = ax - cx
    ry = ay - cy
    a = d1x * d1x + d1y * d1y
    e = d2x * d2x + d2y * d2y
    f = d2x * rx + d2y * ry
    if a <= 1e-300 and e <= 1e-300:
        s = t = 0.0
    elif a <= 1e-300:
        s = 0.0
        t = min(max(f / e, 0.0), 1.0)
    else:
        c = d1x * rx + d1y * ry
        if e <= 1e-300:
            t = 0.0
            s = min(max(-c / a, 0.0), 1.0)
        else:
            b = d1x * d2x + d1y * d2y
            denom = a * e - b * b
            if denom > 0.0:
                s = min(max((b * f - c * e) / denom, 0.0), 1.0)
            else:
                s = 0.0
            t = b * s + f
            if t < 0.0:
                t = 0.0
                s = min(max(-c / a, 0.0), 1.0)
            elif t > e:
                t = 1.0
                s = min(max((b - c) / a, 0.0), 1.0)
            else:
                t = t / e
    px = ax + s * d1x
    py = ay + s * d1y
    qx = cx + t * d2x
    qy = cy + t * d2y
    return math.hypot(px - qx, py - qy), px, py, qx, qy


def _poly_inside_depth(verts, px, py):
    """min over edges of inward signed distance; > 0 iff strictly inside."""
    m = len(verts)
    best = math.inf
    for i in range(m):
        x0, y0 = verts[i, 0], verts[i, 1]
        j = i + 1 if i + 1 < m else 0
        x1, y1 = verts[j, 0], verts[j, 1]
        ex = x1 - x0
        ey = y1 - y0
        ln = math.hypot(ex, ey)
        d = (ex * (py - y0) - ey * (px - x0)) / ln
        if d < best:
            best = d
    return best


def _poly_boundary_closest(verts, px, py):
    m = len(verts)
    best = math.inf
    bwx = bwy = 0.0
    for i in range(m):
        j = i + 1 if i + 1 < m else 0
        d, wx, wy = point_seg(px, py, verts[i, 0], verts[i, 1], verts[j, 0], verts[j, 1])
        if d < best:
            best = d
            bwx, bwy = wx, wy
    return best, bwx, bwy


def poly_point(verts, px, py):
    """Signed distance from convex polygon to a point: (d, wx, wy), w on boundary."""
    d, wx, wy = _poly_boundary_closest(verts, px, py)
    if _poly_inside_depth(verts, px, py) > 0.0:
        return -d, wx, wy
    return d, wx, wy


def poly_seg(verts, ax, ay, bx, by):
    """Signed distance from convex polygon to segment AB.

    Returns (d, sx, sy, wx, wy) with s on the segment and w on the polygon
    boundary. Penetration is the deepest point of the segment inside the
    polygon (the inside-depth function is concave along the segment, so a
    ternary search finds its maximum).
    """
    lo, hi = 0.0, 1.0
    for _ in range(_TERNARY_ITERS):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        g1 = _poly_inside_depth(verts, ax + m1 * (bx - ax), ay + m1 * (by - ay))
        g2 = _poly_inside_depth(verts, ax + m2 * (bx - ax), ay + m2 * (by - ay))
        if g1 < g2:
            lo = m1
        else:
            hi = m2
    t = 0.5 * (lo + hi)
    sx = ax + t * (bx - ax)
    sy = ay + t * (by - ay)
    depth = _poly_inside_depth(verts, sx, sy)
    if depth > 0.0:
        _, wx, wy = _poly_boundary_closest(verts, sx, sy)
        return -depth, sx, sy, wx, wy
    m = len(verts)
    best = math.inf
    bsx = bsy = bwx = bwy = 0.0
    for i in range(m):
        j = i + 1 if i + 1 < m else 0
        d, qx, qy, px_, py_ = seg_seg(
            verts[i, 0], verts[i, 1], verts[j, 0], verts[j, 1], ax, ay, bx, by
        )
        if d < best:
            best = d
            bwx, bwy = qx, qy
            bsx, bsy = px_, py_
    return best, bsx, bsy, bwx, bwy


def poly_poly(va, vb):
    """Signed distance between convex polygons: (d, wax, way, wbx, wby).

    Disjoint: exact minimum over edge pairs. Overlapping: minus the minimum
    translation distance from a separating-axis sweep; witnesses are the
    deepest vertex and its boundary projection (approximate, only used for
    push directions).
    """
    # SAT over both polygons' edge normals.
    min_overlap = math.inf
    separated = False
    for verts in (va, vb):
        m = len(verts)
        for i in range(m):
            j = i + 1 if i + 1 < m else 0
            nx = verts[j, 1] - verts[i, 1]
            ny = -(verts[j, 0] - verts[i, 0])
            ln = math.hypot(nx, ny)
            nx /= ln
            ny /= ln
            amin = amax = va[0, 0] * nx + va[0, 1] * ny
            for k in range(1, len(va)):
                p = va[k, 0] * nx + va[k, 1] * ny
                if p < amin:
                    amin = p
                elif p > amax:
                    amax = p
            bmin = bmax = vb[0, 0] * nx + vb[0, 1] * ny
            for k in range(1, len(vb)):
                p = vb[k, 0] * nx + vb[k, 1] * ny
                if p < bmin:
                    bmin = p
                elif p > bmax:
                    bmax = p
            overlap = min(amax, bmax) - max(amin, bmin)
            if overlap < 0.0:
                separated = True
                break
            if overlap < min_overlap:
                min_overlap = overlap
        if separated:
            break
    if not separated:
        # Deepest vertex of A inside B (or the reverse) as witness pair.
        best = -math.inf
        wax = way = wbx = wby = 0.0
        for k in range(len(va)):
            depth = _poly_inside_depth(vb, va[k, 0], va[k, 1])
            if depth > best:
                best = depth
                wax, way = va[k, 0], va[k, 1]
                _, wbx, wby = _poly_boundary_closest(vb, wax, way)
        for k in range(len(vb)):
            depth = _poly_inside_depth(va, vb[k, 0], vb[k, 1])
            if depth > best:
                best = depth
                wbx, wby = vb[k, 0], vb[k, 1]
                _, wax, way = _poly_boundary_closest(va, wbx, wby)
        return -min_overlap, wax, way, wbx, wby
    best = math.inf
    wax = way = wbx = wby = 0.0
    ma = len(va)
    mb = len(vb)
    for i in range(ma):
        i2 = i + 1 if i + 1 < ma else 0
        for j in range(mb):
            j2 = j + 1 if j + 1 < mb else 0
            d, px, py, qx, qy = seg_seg(
                va[i, 0], va[i, 1], va[i2, 0], va[i2, 1],
                vb[j, 0], vb[j, 1], vb[j2, 0], vb[j2, 1],
            )
            if d < best:
                best = d
                wax, way, wbx, wby = px, py, qx, qy
    return best, wax, way, wbx, wby
