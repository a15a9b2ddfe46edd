# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; semantics mirror gaplab._kernels._fallback.

Expression structure is kept identical to the numpy fallback so both
backends produce bit-identical results.
"""

from libc.math cimport sqrt, fabs, floor, INFINITY

import numpy as np


def frechet_dp(a, b):
    cdef double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0], m = bv.shape[0]
    cdef Py_ssize_t i, j
    cdef double dx, dy, d, up, diag, left, m3
    row = np.empty(m, dtype=np.float64)
    prev = np.empty(m, dtype=np.float64)
    cdef double[::1] rowv = row, prevv = prev

    for i in range(n):
        for j in range(m):
            dx = av[i, 0] - bv[j, 0]
            dy = av[i, 1] - bv[j, 1]
            d = sqrt(dx * dx + dy * dy)
            if i == 0 and j == 0:
                rowv[j] = d
                continue
            up = prevv[j] if i > 0 else INFINITY
            diag = prevv[j - 1] if (i > 0 and j > 0) else INFINITY
            left = rowv[j - 1] if j > 0 else INFINITY
            m3 = up if up < diag else diag
            if left < m3:
                m3 = left
            rowv[j] = d if d > m3 else m3
        prevv, rowv = rowv, prevv
    return float(prevv[m - 1])


def dbscan_labels(points, double eps, Py_ssize_t min_pts):
    cdef double[:, ::1] pts = np.ascontiguousarray(points, dtype=np.float64)
    cdef Py_ssize_t n = pts.shape[0]
    labels_arr = np.full(n, -1, dtype=np.int64)
    cdef long long[::1] labels = labels_arr
    if n == 0:
        return labels_arr
    cdef double eps2 = eps * eps
    cells_arr = np.empty((n, 3), dtype=np.int64)
    cdef long long[:, ::1] cells = cells_arr
    cdef Py_ssize_t i, j
    for i in range(n):
        cells[i, 0] = <long long>floor(pts[i, 0] / eps)
        cells[i, 1] = <long long>floor(pts[i, 1] / eps)
        cells[i, 2] = <long long>floor(pts[i, 2] / eps)
    grid = {}
    for i in range(n):
        key = (cells[i, 0], cells[i, 1], cells[i, 2])
        bucket = grid.get(key)
        if bucket is None:
            grid[key] = [i]
        else:
            bucket.append(i)

    cand_arr = np.empty(n, dtype=np.int64)
    nb_arr = np.empty(n, dtype=np.int64)
    queue_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] cand = cand_arr, nb = nb_arr
    cdef long long[::1] queue = queue_arr
    visited_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] visited = visited_arr
    cdef Py_ssize_t ncand, nnb, head, tail, cluster = 0
    cdef Py_ssize_t q, c
    cdef long long ox, oy, oz
    cdef double ddx, ddy, ddz, dd

    for i in range(n):
        if visited[i]:
            continue
        visited[i] = 1
        ncand = 0
        for ox in range(cells[i, 0] - 1, cells[i, 0] + 2):
            for oy in range(cells[i, 1] - 1, cells[i, 1] + 2):
                for oz in range(cells[i, 2] - 1, cells[i, 2] + 2):
                    bucket = grid.get((ox, oy, oz))
                    if bucket is not None:
                        for c in bucket:
                            cand[ncand] = c
                            ncand += 1
        nnb = 0
        for j in range(ncand):
            c = cand[j]
            ddx = pts[c, 0] - pts[i, 0]
            ddy = pts[c, 1] - pts[i, 1]
            ddz = pts[c, 2] - pts[i, 2]
            dd = ddx * ddx + ddy * ddy + ddz * ddz
            if dd <= eps2:
                nb[nnb] = c
                nnb += 1
        if nnb < min_pts:
            continue
        # claim at enqueue time: each point enters the queue at most once,
        # and border points belong to the first cluster that reaches them
        labels[i] = cluster
        head = 0
        tail = 0
        for j in range(nnb):
            q = nb[j]
            if labels[q] == -1:
                labels[q] = cluster
                queue[tail] = q
                tail += 1
        while head < tail:
            q = queue[head]
            head += 1
            if visited[q]:
                continue
            visited[q] = 1
            ncand = 0
            for ox in range(cells[q, 0] - 1, cells[q, 0] + 2):
                for oy in range(cells[q, 1] - 1, cells[q, 1] + 2):
                    for oz in range(cells[q, 2] - 1, cells[q, 2] + 2):
                        bucket = grid.get((ox, oy, oz))
                        if bucket is not None:
                            for c in bucket:
                                cand[ncand] = c
                                ncand += 1
            nnb = 0
            for j in range(ncand):
                c = cand[j]
                ddx = pts[c, 0] - pts[q, 0]
                ddy = pts[c, 1] - pts[q, 1]
                ddz = pts[c, 2] - pts[q, 2]
                dd = ddx * ddx + ddy * ddy + ddz * ddz
                if dd <= eps2:
                    nb[nnb] = c
                    nnb += 1
            if nnb >= min_pts:
                for j in range(nnb):
                    c = nb[j]
                    if labels[c] == -1:
                        labels[c] = cluster
                        queue[tail] = c
                        tail += 1
        cluster += 1
    return labels_arr


def raycast_boxes(origin, dirs, boxes, double near, double max_range,
                  double sentinel):
    cdef double[:, ::1] dv = np.ascontiguousarray(dirs, dtype=np.float64)
    cdef double[:, ::1] bx_ = np.ascontiguousarray(boxes, dtype=np.float64)
    cdef Py_ssize_t k = dv.shape[0], nbox = bx_.shape[0]
    out_arr = np.empty(k, dtype=np.float32)
    cdef float[::1] out = out_arr
    cdef double ox = origin[0], oy = origin[1], oz = origin[2]
    cdef Py_ssize_t p, bi, ax
    cdef double bxc, byc, bzc, hx, hy, hz, cy_, sy_
    cdef double rx, ry, rz, dxp, dyp, dzp
    cdef double t_enter, t_exit, t1, t2, lo, hi, best
    cdef double o_s, h, d
    cdef double PARALLEL_EPS = 1e-12

    for p in range(k):
        best = sentinel
        for bi in range(nbox):
            bxc = bx_[bi, 0]; byc = bx_[bi, 1]; bzc = bx_[bi, 2]
            hx = bx_[bi, 3]; hy = bx_[bi, 4]; hz = bx_[bi, 5]
            cy_ = bx_[bi, 6]; sy_ = bx_[bi, 7]
            rx = cy_ * (ox - bxc) + sy_ * (oy - byc)
            ry = -sy_ * (ox - bxc) + cy_ * (oy - byc)
            rz = oz - bzc
            dxp = cy_ * dv[p, 0] + sy_ * dv[p, 1]
            dyp = -sy_ * dv[p, 0] + cy_ * dv[p, 1]
            dzp = dv[p, 2]
            t_enter = -INFINITY
            t_exit = INFINITY
            for ax in range(3):
                if ax == 0:
                    o_s = rx; h = hx; d = dxp
                elif ax == 1:
                    o_s = ry; h = hy; d = dyp
                else:
                    o_s = rz; h = hz; d = dzp
                if fabs(d) < PARALLEL_EPS:
                    if fabs(o_s) <= h:
                        lo = -INFINITY
                        hi = INFINITY
                    else:
                        lo = INFINITY
                        hi = -INFINITY
                else:
                    t1 = (-h - o_s) / d
                    t2 = (h - o_s) / d
                    lo = t1 if t1 < t2 else t2
                    hi = t2 if t1 < t2 else t1
                if lo > t_enter:
                    t_enter = lo
                if hi < t_exit:
                    t_exit = hi
            if t_enter <= t_exit and t_enter >= near and t_enter <= max_range:
                if t_enter < best:
                    best = t_enter
        out[p] = <float>best
    return out_arr
