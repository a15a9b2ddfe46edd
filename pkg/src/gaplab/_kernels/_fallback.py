"""Vectorized numpy implementations of the hot kernels.

These are the reference semantics; gaplab._kernels._native mirrors them
in Cython. Both backends keep the exact same floating-point expression
structure so results are bit-identical (min/max/sqrt/div are exact or
correctly rounded, and no reassociation happens).
"""

import numpy as np

_PARALLEL_EPS = 1e-12


def frechet_dp(a, b):
    """Discrete Frechet distance between polylines a (n,2) and b (m,2).

    Dynamic program evaluated along anti-diagonals so each sweep is a
    vector operation. Cell recurrence:
        C[i, j] = max(d(i, j), min(C[i-1, j], C[i-1, j-1], C[i, j-1]))
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n, m = a.shape[0], b.shape[0]
    dx = a[:, 0][:, None] - b[:, 0][None, :]
    dy = a[:, 1][:, None] - b[:, 1][None, :]
    d = np.sqrt(dx * dx + dy * dy)

    # 1-based table with an infinite border; C[0,0] = -inf seeds the corner.
    c = np.full((n + 1, m + 1), np.inf)
    c[0, 0] = -np.inf
    for k in range(2, n + m + 1):
        i = np.arange(max(1, k - m), min(n, k - 1) + 1)
        j = k - i
        m3 = np.minimum(np.minimum(c[i - 1, j], c[i - 1, j - 1]), c[i, j - 1])
        c[i, j] = np.maximum(d[i - 1, j - 1], m3)
    return float(c[n, m])


def _grid_index(points, eps):
    cells = np.floor(points / eps).astype(np.int64)
    grid = {}
    for idx in range(cells.shape[0]):
        key = (cells[idx, 0], cells[idx, 1], cells[idx, 2])
        grid.setdefault(key, []).append(idx)
    return cells, grid


def dbscan_labels(points, eps, min_pts):
    """Classic DBSCAN labels for an (n,3) cloud; -1 marks noise.

    Clusters are numbered in order of their first core point (ascending
    index scan); border points belong to the first cluster that reaches
    them. A point counts in its own eps-neighborhood.
    """
    pts = np.ascontiguousarray(points, dtype=np.float64)
    n = pts.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return labels
    eps2 = eps * eps
    cells, grid = _grid_index(pts, eps)

    def neighbors(i):
        cx, cy, cz = cells[i]
        cand = []
        for ox in (-1, 0, 1):
            for oy in (-1, 0, 1):
                for oz in (-1, 0, 1):
                    cand.extend(grid.get((cx + ox, cy + oy, cz + oz), ()))
        cand = np.asarray(cand, dtype=np.int64)
        delta = pts[cand] - pts[i]
        dd = delta[:, 0] ** 2 + delta[:, 1] ** 2 + delta[:, 2] ** 2
        return cand[dd <= eps2]

    visited = np.zeros(n, dtype=bool)
    cluster = 0
    for i in range(n):
        if visited[i]:
            continue
        visited[i] = True
        nb = neighbors(i)
        if nb.size < min_pts:
            continue
        # claim at enqueue time: each point enters the queue at most once,
        # and border points belong to the first cluster that reaches them
        labels[i] = cluster
        queue = [int(q) for q in nb if labels[q] == -1]
        for q in queue:
            labels[q] = cluster
        head = 0
        while head < len(queue):
            q = queue[head]
            head += 1
            if visited[q]:
                continue
            visited[q] = True
            qnb = neighbors(q)
            if qnb.size >= min_pts:
                for r in qnb:
                    if labels[r] == -1:
                        labels[r] = cluster
                        queue.append(int(r))
        cluster += 1
    return labels


def raycast_boxes(origin, dirs, boxes, near, max_range, sentinel):
    """Planar-depth ray cast of per-pixel rays against yaw-oriented boxes.

    dirs is (k,3), scaled so the depth parameter equals distance along
    the optical axis. boxes rows are (cx, cy, cz, hx, hy, hz, cos_yaw,
    sin_yaw). Returns float32 depths of length k, sentinel where no box
    is hit inside (near, max_range].
    """
    dirs = np.asarray(dirs, dtype=np.float64)
    boxes = np.asarray(boxes, dtype=np.float64)
    k = dirs.shape[0]
    best = np.full(k, sentinel)
    ox, oy, oz = (float(origin[0]), float(origin[1]), float(origin[2]))
    for bi in range(boxes.shape[0]):
        bx, by, bz, hx, hy, hz, cy_, sy_ = boxes[bi]
        # ray origin and directions in the box frame (rotate by -yaw)
        rx = cy_ * (ox - bx) + sy_ * (oy - by)
        ry = -sy_ * (ox - bx) + cy_ * (oy - by)
        rz = oz - bz
        dxp = cy_ * dirs[:, 0] + sy_ * dirs[:, 1]
        dyp = -sy_ * dirs[:, 0] + cy_ * dirs[:, 1]
        dzp = dirs[:, 2]

        t_enter = np.full(k, -np.inf)
        t_exit = np.full(k, np.inf)
        for o_s, h, d in ((rx, hx, dxp), (ry, hy, dyp), (rz, hz, dzp)):
            par = np.abs(d) < _PARALLEL_EPS
            d_safe = np.where(par, 1.0, d)
            t1 = (-h - o_s) / d_safe
            t2 = (h - o_s) / d_safe
            lo = np.minimum(t1, t2)
            hi = np.maximum(t1, t2)
            inside = abs(o_s) <= h
            lo = np.where(par, -np.inf if inside else np.inf, lo)
            hi = np.where(par, np.inf if inside else -np.inf, hi)
            t_enter = np.maximum(t_enter, lo)
            t_exit = np.minimum(t_exit, hi)

        hit = (t_enter <= t_exit) & (t_enter >= near) & (t_enter <= max_range)
        best = np.minimum(best, np.where(hit, t_enter, sentinel))
    return best.astype(np.float32)
