"""Track-relative lattice planner.

Candidates are constant lateral offsets from the centerline sampled
over a fixed horizon. Cost combines offset magnitude, an obstacle
proximity penalty (infinite inside the clearance disk, clearance^2/d^2
outside), and an offset-adjusted curvature proxy. Ties break toward the
smaller |offset| and then toward the left.
"""

import math
from dataclasses import dataclass

import numpy as np


class PlannerBlocked(RuntimeError):
    """Every candidate intersects a clearance disk; the caller must stop."""


@dataclass(frozen=True)
class LatticeParams:
    """Candidate set and cost weights.

    w_obs is balanced against w_lat so the marginal value of clearing
    beyond the clearance disk fades around 0.3-0.4 m (with the steep
    clearance^2/d^2 falloff, a heavier w_obs makes every obstacle push
    the plan to the outermost offset). switch_weight charges lateral
    jumps away from the vehicle's current offset, which keeps the
    selection from flip-flopping between symmetric candidates.
    """

    lateral_offsets: tuple = (-0.4, -0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4)
    horizon: float = 1.5
    samples_per_candidate: int = 15
    weights: tuple = (1.0, 0.15, 0.2)  # w_lat, w_obs, w_curv
    switch_weight: float = 0.5
    clearance: float = 0.3

    def __post_init__(self):
        if 0.0 not in self.lateral_offsets:
            raise ValueError("lateral_offsets must contain 0")
        if self.clearance <= 0:
            raise ValueError("clearance must be positive")


def _candidate_points(track, s0, offset, params):
    pts = []
    curvs = []
    step = params.horizon / params.samples_per_candidate
    prev_tangent = None
    for k in range(1, params.samples_per_candidate + 1):
        s = s0 + k * step
        (cx, cy), (tx, ty) = track.point_at(s)
        pts.append((cx - ty * offset, cy + tx * offset))
        if prev_tangent is not None:
            cross = prev_tangent[0] * ty - prev_tangent[1] * tx
            dot = prev_tangent[0] * tx + prev_tangent[1] * ty
            kappa_c = math.atan2(cross, dot) / step
            denom = 1.0 - offset * kappa_c
            if abs(denom) < 1e-6:
                denom = math.copysign(1e-6, denom)
            curvs.append(abs(kappa_c / denom))
        prev_tangent = (tx, ty)
    return pts, (sum(curvs) / len(curvs) if curvs else 0.0)


def plan_lattice(track, state, detections_xy, params):
    """Select the cheapest collision-free offset path.

    detections_xy: world-frame (x, y) obstacle centroids. Returns the
    candidate's waypoints in world frame; raises PlannerBlocked when no
    candidate has finite cost.
    """
    w_lat, w_obs, w_curv = params.weights
    _, current_lat, s0 = track.lane_query(state.pose.x, state.pose.y)
    det = np.asarray(detections_xy, dtype=np.float64).reshape(-1, 2)

    best = None
    for offset in params.lateral_offsets:
        pts, curv_proxy = _candidate_points(track, s0, offset, params)
        cost = (w_lat * abs(offset) + w_curv * curv_proxy
                + params.switch_weight * abs(offset - current_lat))
        if det.shape[0]:
            arr = np.asarray(pts)
            d = np.hypot(arr[:, 0][:, None] - det[None, :, 0],
                         arr[:, 1][:, None] - det[None, :, 1])
            dmin = d.min(axis=0)  # closest approach per detection
            if (dmin < params.clearance).any():
                continue  # infinite cost
            penalties = np.sort(params.clearance**2 / (dmin * dmin))
            cost += w_obs * float(penalties.sum())
        key = (cost, abs(offset), 0 if offset > 0 else 1)
        if best is None or key < best[0]:
            best = (key, pts)
    if best is None:
        raise PlannerBlocked("all lattice candidates intersect a clearance disk")
    return best[1]
