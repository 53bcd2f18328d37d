# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometric kernels; mirrors coplan._kernels_py exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport hypot, cos, sin, INFINITY

cnp.import_array()

DEF TERNARY_ITERS = 100


def chain_points(double base_x, double base_y, const double[::1] lengths, const double[::1] q):
    cdef Py_ssize_t n = lengths.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n + 1, 2))
    cdef double[:, ::1] pts = out
    cdef double ang = 0.0, x = base_x, y = base_y
    cdef Py_ssize_t i
    pts[0, 0] = base_x
    pts[0, 1] = base_y
    for i in range(n):
        ang += q[i]
        x += lengths[i] * cos(ang)
        y += lengths[i] * sin(ang)
        pts[i + 1, 0] = x
        pts[i + 1, 1] = y
    return out


cdef inline double _clamp01(double v) nogil:
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


cdef inline double _point_seg(double px, double py, double ax, double ay,
                              double bx, double by, double* wx, double* wy) nogil:
    cdef double ux = bx - ax
    cdef double uy = by - ay
    cdef double denom = ux * ux + uy * uy
    cdef double t
    if denom <= 0.0:
        t = 0.0
    else:
        t = _clamp01(((px - ax) * ux + (py - ay) * uy) / denom)
    wx[0] = ax + t * ux
    wy[0] = ay + t * uy
    return hypot(px - wx[0], py - wy[0])


def point_seg(double px, double py, double ax, double ay, double bx, double by):
    cdef double wx, wy
    cdef double d = _point_seg(px, py, ax, ay, bx, by, &wx, &wy)
    return d, wx, wy


cdef inline double _seg_seg(double ax, double ay, double bx, double by,
                            double cx, double cy, double dx, double dy,
                            double* opx, double* opy, double* oqx, double* oqy) nogil:
    cdef double d1x = bx - ax, d1y = by - ay
    cdef double d2x = dx - cx, d2y = dy - cy
    cdef double rx = ax - cx, ry = ay - cy
    cdef double a = d1x * d1x + d1y * d1y
    cdef double e = d2x * d2x + d2y * d2y
    cdef double f = d2x * rx + d2y * ry
    cdef double s, t, c, b, denom
    if a <= 1e-300 and e <= 1e-300:
        s = 0.0
        t = 0.0
    elif a <= 1e-300:
        s = 0.0
        t = _clamp01(f / e)
    else:
        c = d1x * rx + d1y * ry
        if e <= 1e-300:
            t = 0.0
            s = _clamp01(-c / a)
        else:
            b = d1x * d2x + d1y * d2y
            denom = a * e - b * b
            if denom > 0.0:
                s = _clamp01((b * f - c * e) / denom)
            else:
                s = 0.0
            t = b * s + f
            if t < 0.0:
                t = 0.0
                s = _clamp01(-c / a)
            elif t > e:
                t = 1.0
                s = _clamp01((b - c) / a)
            else:
                t = t / e
    opx[0] = ax + s * d1x
    opy[0] = ay + s * d1y
    oqx[0] = cx + t * d2x
    oqy[0] = cy + t * d2y
    return hypot(opx[0] - oqx[0], opy[0] - oqy[0])


def seg_seg(double ax, double ay, double bx, double by,
            double cx, double cy, double dx, double dy):
    cdef double px, py, qx, qy
    cdef double d = _seg_seg(ax, ay, bx, by, cx, cy, dx, dy, &px, &py, &qx, &qy)
    return d, px, py, qx, qy


cdef inline double _inside_depth(const double[:, ::1] verts, double px, double py) nogil:
    cdef Py_ssize_t m = verts.shape[0]
    cdef double best = INFINITY
    cdef Py_ssize_t i, j
    cdef double ex, ey, ln, d
    for i in range(m):
        j = i + 1 if i + 1 < m else 0
        ex = verts[j, 0] - verts[i, 0]
        ey = verts[j, 1] - verts[i, 1]
        ln = hypot(ex, ey)
        d = (ex * (py - verts[i, 1]) - ey * (px - verts[i, 0])) / ln
        if d < best:
            best = d
    return best


cdef inline double _boundary_closest(const double[:, ::1] verts, double px, double py,
                                     double* owx, double* owy) nogil:
    cdef Py_ssize_t m = verts.shape[0]
    cdef double best = INFINITY
    cdef double wx = 0.0, wy = 0.0, d
    cdef Py_ssize_t i, j
    for i in range(m):
        j = i + 1 if i + 1 < m else 0
        d = _point_seg(px, py, verts[i, 0], verts[i, 1], verts[j, 0], verts[j, 1], &wx, &wy)
        if d < best:
            best = d
            owx[0] = wx
            owy[0] = wy
    return best


def poly_point(const double[:, ::1] verts, double px, double py):
    cdef double wx = 0.0, wy = 0.0
    cdef double d = _boundary_closest(verts, px, py, &wx, &wy)
    if _inside_depth(verts, px, py) > 0.0:
        return -d, wx, wy
    return d, wx, wy


def poly_seg(const double[:, ::1] verts, double ax, double ay, double bx, double by):
    cdef double lo = 0.0, hi = 1.0
    cdef double m1, m2, g1, g2, t, sx, sy, depth
    cdef double wx = 0.0, wy = 0.0
    cdef Py_ssize_t it, i, j, m
    for it in range(TERNARY_ITERS):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        g1 = _inside_depth(verts, ax + m1 * (bx - ax), ay + m1 * (by - ay))
        g2 = _inside_depth(verts, ax + m2 * (bx - ax), ay + m2 * (by - ay))
        if g1 < g2:
            lo = m1
        else:
            hi = m2
    t = 0.5 * (lo + hi)
    sx = ax + t * (bx - ax)
    sy = ay + t * (by - ay)
    depth = _inside_depth(verts, sx, sy)
    if depth > 0.0:
        _boundary_closest(verts, sx, sy, &wx, &wy)
        return -depth, sx, sy, wx, wy
    m = verts.shape[0]
    cdef double best = INFINITY
    cdef double bsx = 0.0, bsy = 0.0, bwx = 0.0, bwy = 0.0
    cdef double d, qx, qy, px_, py_
    for i in range(m):
        j = i + 1 if i + 1 < m else 0
        d = _seg_seg(verts[i, 0], verts[i, 1], verts[j, 0], verts[j, 1],
                     ax, ay, bx, by, &qx, &qy, &px_, &py_)
        if d < best:
            best = d
            bwx = qx
            bwy = qy
            bsx = px_
            bsy = py_
    return best, bsx, bsy, bwx, bwy


def poly_poly(const double[:, ::1] va, const double[:, ::1] vb):
    cdef Py_ssize_t ma = va.shape[0], mb = vb.shape[0]
    cdef double min_overlap = INFINITY
    cdef bint separated = False
    cdef Py_ssize_t which, i, j, k, i2, j2, m
    cdef double nx, ny, ln, amin, amax, bmin, bmax, p, overlap
    cdef const double[:, ::1] verts
    for which in range(2):
        verts = va if which == 0 else vb
        m = verts.shape[0]
        for i in range(m):
            j = i + 1 if i + 1 < m else 0
            nx = verts[j, 1] - verts[i, 1]
            ny = -(verts[j, 0] - verts[i, 0])
            ln = hypot(nx, ny)
            nx /= ln
            ny /= ln
            amin = amax = va[0, 0] * nx + va[0, 1] * ny
            for k in range(1, ma):
                p = va[k, 0] * nx + va[k, 1] * ny
                if p < amin:
                    amin = p
                elif p > amax:
                    amax = p
            bmin = bmax = vb[0, 0] * nx + vb[0, 1] * ny
            for k in range(1, mb):
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
    cdef double best, depth
    cdef double wax = 0.0, way = 0.0, wbx = 0.0, wby = 0.0
    cdef double d, px, py, qx, qy
    if not separated:
        best = -INFINITY
        for k in range(ma):
            depth = _inside_depth(vb, va[k, 0], va[k, 1])
            if depth > best:
                best = depth
                wax = va[k, 0]
                way = va[k, 1]
                _boundary_closest(vb, wax, way, &wbx, &wby)
        for k in range(mb):
            depth = _inside_depth(va, vb[k, 0], vb[k, 1])
            if depth > best:
                best = depth
                wbx = vb[k, 0]
                wby = vb[k, 1]
                _boundary_closest(va, wbx, wby, &wax, &way)
        return -min_overlap, wax, way, wbx, wby
    best = INFINITY
    for i in range(ma):
        i2 = i + 1 if i + 1 < ma else 0
        for j in range(mb):
            j2 = j + 1 if j + 1 < mb else 0
            d = _seg_seg(va[i, 0], va[i, 1], va[i2, 0], va[i2, 1],
                         vb[j, 0], vb[j, 1], vb[j2, 0], vb[j2, 1],
                         &px, &py, &qx, &qy)
            if d < best:
                best = d
                wax = px
                way = py
                wbx = qx
                wby = qy
    return best, wax, way, wbx, wby
