"""Sensor frame types, camera intrinsics and mounts.

Sensor frame convention: x right, y down, z forward (so the pinhole
reprojection is x = (i - cx) * z / fx, y = (j - cy) * z / fy, z = depth
with i the column and j the row index). Vehicle frame: x forward,
y left, z up. Depth images store planar z-depth (distance along the
optical axis); values above max_range use the sentinel max_range + 1.
"""

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")


TOF_INTRINSICS = CameraIntrinsics(fx=160.0, fy=160.0, cx=128.0, cy=96.0, width=256, height=192)
RGB_INTRINSICS = CameraIntrinsics(fx=277.0, fy=277.0, cx=160.0, cy=120.0, width=320, height=240)

TOF_MAX_RANGE = 5.0
TOF_MIN_RANGE = 0.10


@dataclass(frozen=True)
class CameraMount:
    """Rigid sensor mount in the vehicle frame; pitch is downward-positive."""

    x: float = 0.10
    y: float = 0.0
    z: float = 0.12
    pitch: float = 0.0

    def rotation_vehicle_from_sensor(self):
        # base: sensor x -> -y_v, sensor y -> -z_v, sensor z -> +x_v
        base = np.array([[0.0, 0.0, 1.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]])
        c, s = math.cos(self.pitch), math.sin(self.pitch)
        pitch_rot = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
        return pitch_rot @ base


RGB_MOUNT = CameraMount(x=0.10, y=0.0, z=0.12, pitch=0.0)
TOF_MOUNT = CameraMount(x=0.10, y=0.0, z=0.10, pitch=0.0)


def _check_image(data, channels, dtype):
    arr = np.asarray(data)
    if arr.dtype != dtype or arr.ndim != 3 or arr.shape[2] != channels:
        raise ValueError(f"expected HxWx{channels} {dtype} buffer, got {arr.dtype} {arr.shape}")
    return arr


@dataclass(frozen=True)
class RGBImage:
    data: np.ndarray  # (H, W, 3) uint8

    def __post_init__(self):
        object.__setattr__(self, "data", _check_image(self.data, 3, np.uint8))

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def height(self):
        return self.data.shape[0]

    def tobytes(self):
        return self.data.tobytes()


@dataclass(frozen=True)
class RGBAImage:
    data: np.ndarray  # (H, W, 4) uint8, alpha strictly 0 or 255

    def __post_init__(self):
        object.__setattr__(self, "data", _check_image(self.data, 4, np.uint8))

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def alpha(self):
        return self.data[:, :, 3]

    def over_background(self, color):
        """Flatten to RGB over a constant background color."""
        out = np.empty(self.data.shape[:2] + (3,), dtype=np.uint8)
        out[:] = np.asarray(color, dtype=np.uint8)
        covered = self.data[:, :, 3] == 255
        out[covered] = self.data[covered, :3]
        return RGBImage(out)

    def tobytes(self):
        return self.data.tobytes()


@dataclass(frozen=True)
class DepthImage:
    data: np.ndarray  # (H, W) float32, planar z-depth in meters
    max_range: float = TOF_MAX_RANGE

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.dtype != np.float32 or arr.ndim != 2:
            raise ValueError(f"expected HxW float32 depth, got {arr.dtype} {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("depth values must be finite")
        object.__setattr__(self, "data", arr)

    @property
    def sentinel(self):
        return np.float32(self.max_range + 1.0)

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def height(self):
        return self.data.shape[0]

    def valid_mask(self):
        return self.data <= self.max_range

    def tobytes(self):
        return self.data.tobytes()


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray  # (N, 3) float64
    frame: str  # sensor | vehicle | world
    pixel_indices: np.ndarray | None = None  # flat pixel index per point

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        if not np.isfinite(pts).all():
            raise ValueError("point coordinates must be finite")
        if self.frame not in ("sensor", "vehicle", "world"):
            raise ValueError(f"unknown frame {self.frame!r}")
        object.__setattr__(self, "points", pts)
        if self.pixel_indices is not None:
            object.__setattr__(self, "pixel_indices",
                               np.asarray(self.pixel_indices, dtype=np.int64).reshape(-1))

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class RenderMask:
    floor: bool = True
    lane_markings: bool = True
    obstacles: bool = True
    walls: bool = True

    @classmethod
    def full(cls):
        return cls()

    @classmethod
    def none(cls):
        return cls(floor=False, lane_markings=False, obstacles=False, walls=False)

    @classmethod
    def obstacles_only(cls):
        return cls(floor=False, lane_markings=False, obstacles=True, walls=False)

    @classmethod
    def background(cls):
        """Everything except obstacles (the MR 'real world' view)."""
        return cls(floor=True, lane_markings=True, obstacles=False, walls=True)
