"""Planar pose algebra, Catmull-Rom splines, Frechet distance, circle fit.

Conventions used everywhere in the package:
  * world frame is x/y on the ground plane, z up, yaw counter-clockwise
    positive and normalized to (-pi, pi],
  * trajectories are time-ordered pose samples,
  * splines are centripetal Catmull-Rom (alpha = 0.5).
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from gaplab import _kernels

TAU = 2.0 * math.pi


def normalize_angle(angle):
    """Wrap an angle to (-pi, pi]."""
    r = math.remainder(angle, TAU)
    if r <= -math.pi:
        r += TAU
    return r


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    z: float = 0.0
    yaw: float = 0.0
    timestamp: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "yaw", normalize_angle(self.yaw))

    def with_timestamp(self, t):
        return replace(self, timestamp=t)


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered sequence of poses with strictly increasing timestamps."""

    poses: tuple

    def __post_init__(self):
        poses = tuple(self.poses)
        if not poses:
            raise ValueError("trajectory needs at least one pose")
        for a, b in zip(poses, poses[1:]):
            if b.timestamp <= a.timestamp:
                raise ValueError("trajectory timestamps must strictly increase")
        object.__setattr__(self, "poses", poses)

    def __len__(self):
        return len(self.poses)

    def __iter__(self):
        return iter(self.poses)

    def xy(self):
        return np.array([[p.x, p.y] for p in self.poses], dtype=np.float64)


@dataclass(frozen=True)
class Spline:
    """Centripetal Catmull-Rom control polygon."""

    control_points: tuple
    closed: bool = False

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.control_points)
        if len(pts) < 4:
            raise ValueError("spline needs at least 4 control points")
        object.__setattr__(self, "control_points", pts)

    @property
    def num_segments(self):
        """Open splines span the interior control points only."""
        n = len(self.control_points)
        return n if self.closed else n - 3


def _segment_points(spline, segment):
    n = len(spline.control_points)
    if segment < 0 or segment >= spline.num_segments:
        raise IndexError(f"segment {segment} out of range")
    if spline.closed:
        idx = [(segment - 1) % n, segment % n, (segment + 1) % n, (segment + 2) % n]
    else:
        idx = [segment, segment + 1, segment + 2, segment + 3]
    return [spline.control_points[i] for i in idx]


def catmull_rom_eval(spline, segment, t):
    """Evaluate one spline segment at parameter t in [0, 1].

    t=0 gives the segment's first interior control point, t=1 the second
    (the curve interpolates its interior points). Uses the centripetal
    (alpha = 0.5) Barry-Goldman recursion, which is cusp-free on tight
    layouts.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    p0, p1, p2, p3 = (np.asarray(p, dtype=np.float64) for p in _segment_points(spline, segment))

    def knot(a, b, prev):
        d = math.sqrt(float(np.hypot(*(b - a))))
        return prev + max(d, 1e-12)

    t0 = 0.0
    t1 = knot(p0, p1, t0)
    t2 = knot(p1, p2, t1)
    t3 = knot(p2, p3, t2)
    u = t1 + t * (t2 - t1)

    a1 = (t1 - u) / (t1 - t0) * p0 + (u - t0) / (t1 - t0) * p1
    a2 = (t2 - u) / (t2 - t1) * p1 + (u - t1) / (t2 - t1) * p2
    a3 = (t3 - u) / (t3 - t2) * p2 + (u - t2) / (t3 - t2) * p3
    b1 = (t2 - u) / (t2 - t0) * a1 + (u - t0) / (t2 - t0) * a2
    b2 = (t3 - u) / (t3 - t1) * a2 + (u - t1) / (t3 - t1) * a3
    c = (t2 - u) / (t2 - t1) * b1 + (u - t1) / (t2 - t1) * b2
    return float(c[0]), float(c[1])


def sample_spline(spline, steps_per_segment):
    """Dense polyline over all segments (closed splines wrap around)."""
    pts = []
    for seg in range(spline.num_segments):
        for k in range(steps_per_segment):
            pts.append(catmull_rom_eval(spline, seg, k / steps_per_segment))
    if not spline.closed:
        pts.append(catmull_rom_eval(spline, spline.num_segments - 1, 1.0))
    return np.array(pts, dtype=np.float64)


def discrete_frechet(a, b):
    """Discrete Frechet distance over the x/y projections of two trajectories.

    Accepts Trajectory objects or (n,2) arrays. Symmetric, non-negative,
    zero for identical inputs.
    """
    pa = a.xy() if isinstance(a, Trajectory) else np.asarray(a, dtype=np.float64)
    pb = b.xy() if isinstance(b, Trajectory) else np.asarray(b, dtype=np.float64)
    if pa.size == 0 or pb.size == 0:
        raise ValueError("frechet distance needs non-empty trajectories")
    return _kernels.frechet_dp(pa, pb)


class DegenerateInputError(ValueError):
    pass


def fit_circle(points):
    """Algebraic (Kasa) least-squares circle fit.

    Returns ((cx, cy), radius, rms_residual). Raises DegenerateInputError
    for fewer than 3 points or points collinear within 1e-9.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise DegenerateInputError("circle fit needs at least 3 points")
    centered = pts - pts.mean(axis=0)
    # collinearity: largest perpendicular deviation from the principal axis
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    perp = np.abs(centered @ vt[1])
    if perp.max() < 1e-9:
        raise DegenerateInputError("points are collinear within 1e-9")

    a = np.column_stack([pts[:, 0], pts[:, 1], np.ones(pts.shape[0])])
    rhs = pts[:, 0] ** 2 + pts[:, 1] ** 2
    sol, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    cx, cy = sol[0] / 2.0, sol[1] / 2.0
    radius = math.sqrt(max(sol[2] + cx * cx + cy * cy, 0.0))
    residuals = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy) - radius
    rms = float(np.sqrt(np.mean(residuals**2)))
    return (float(cx), float(cy)), float(radius), rms


def compose(parent, child_offset):
    """Rigid composition: rotate the offset by the parent yaw, then translate."""
    c, s = math.cos(parent.yaw), math.sin(parent.yaw)
    return Pose(
        x=parent.x + c * child_offset.x - s * child_offset.y,
        y=parent.y + s * child_offset.x + c * child_offset.y,
        z=parent.z + child_offset.z,
        yaw=normalize_angle(parent.yaw + child_offset.yaw),
        timestamp=parent.timestamp,
    )


def inverse(pose):
    """Group inverse so that compose(compose(p, a), inverse(a)) == p."""
    c, s = math.cos(-pose.yaw), math.sin(-pose.yaw)
    return Pose(
        x=-(c * pose.x - s * pose.y),
        y=-(s * pose.x + c * pose.y),
        z=-pose.z,
        yaw=normalize_angle(-pose.yaw),
        timestamp=pose.timestamp,
    )


def world_to_frame(pose, x, y):
    """World point into the frame anchored at pose (x forward, y left)."""
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    dx, dy = x - pose.x, y - pose.y
    return c * dx + s * dy, -s * dx + c * dy


def frame_to_world(pose, x, y):
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    return pose.x + c * x - s * y, pose.y + s * x + c * y


# kept as a dataclass field helper for modules that embed trajectories
def trajectory_from_arrays(xs, ys, ts, yaws=None):
    yaws = yaws if yaws is not None else [0.0] * len(xs)
    return Trajectory(tuple(Pose(x=float(x), y=float(y), yaw=float(w), timestamp=float(t))
                            for x, y, w, t in zip(xs, ys, yaws, ts)))
