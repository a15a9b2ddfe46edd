"""Depth-image reprojection and point cloud frame transforms."""

import math

import numpy as np

from gaplab.sensing.types import PointCloud


def depth_to_cloud(depth, intrinsics, min_range):
    """Reproject a depth image into a sensor-frame cloud.

    Pixels below min_range or flagged as no-return are excluded. The
    cloud remembers each point's flat pixel index so clouds rendered
    from aligned frames can be matched point-for-point.
    """
    if (depth.width, depth.height) != (intrinsics.width, intrinsics.height):
        raise ValueError("intrinsics do not match the depth image dimensions")
    d = depth.data.astype(np.float64)
    valid = (d >= min_range) & (d <= depth.max_range)
    jj, ii = np.nonzero(valid)
    z = d[jj, ii]
    x = (ii - intrinsics.cx) * z / intrinsics.fx
    y = (jj - intrinsics.cy) * z / intrinsics.fy
    points = np.column_stack([x, y, z])
    return PointCloud(points=points, frame="sensor",
                      pixel_indices=jj * depth.width + ii)


def project_points(points_sensor, intrinsics):
    """Sensor-frame points back to (i, j, z) pixel coordinates."""
    pts = np.asarray(points_sensor, dtype=np.float64).reshape(-1, 3)
    z = pts[:, 2]
    i = pts[:, 0] * intrinsics.fx / z + intrinsics.cx
    j = pts[:, 1] * intrinsics.fy / z + intrinsics.cy
    return i, j, z


def sensor_to_vehicle(cloud, mount):
    rot = mount.rotation_vehicle_from_sensor()
    pts = cloud.points @ rot.T + np.array([mount.x, mount.y, mount.z])
    return PointCloud(points=pts, frame="vehicle", pixel_indices=cloud.pixel_indices)


def vehicle_to_world(cloud, pose):
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    pts = cloud.points @ rot.T + np.array([pose.x, pose.y, pose.z])
    return PointCloud(points=pts, frame="world", pixel_indices=cloud.pixel_indices)
