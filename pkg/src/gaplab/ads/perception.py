"""LiDAR-style obstacle perception: depth image -> clusters -> detections.

Pipeline: reproject the depth frame, subsample by pixel stride, move to
the vehicle frame, keep a height band above the floor, gate by range,
cluster with DBSCAN, and keep cluster centroids that fall inside the
lane corridor (wall returns cluster far outside it and drop out there).
"""

from dataclasses import dataclass

import numpy as np

from gaplab import _kernels
from gaplab.sensing.cloud import depth_to_cloud, sensor_to_vehicle
from gaplab.sensing.types import TOF_MIN_RANGE


@dataclass(frozen=True)
class ObstacleDetection:
    centroid: tuple  # (x, y, z) in the vehicle frame, meters
    point_count: int
    cluster_id: int


def dbscan_cluster(cloud, eps, min_pts):
    """Cluster a vehicle-frame cloud; noise points are discarded.

    Returns ObstacleDetection per cluster (centroid = cluster mean).
    Degenerate clusters that lost border points to an earlier cluster
    and fell below min_pts are dropped to keep the size invariant.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if min_pts < 1:
        raise ValueError("min_pts must be at least 1")
    if len(cloud) == 0:
        return []
    labels = _kernels.dbscan_labels(cloud.points, float(eps), int(min_pts))
    detections = []
    for cid in range(int(labels.max()) + 1 if labels.size else 0):
        member = labels == cid
        count = int(member.sum())
        if count < min_pts:
            continue
        centroid = cloud.points[member].mean(axis=0)
        detections.append(ObstacleDetection(centroid=tuple(float(v) for v in centroid),
                                            point_count=count, cluster_id=cid))
    return detections


@dataclass(frozen=True)
class PerceptionConfig:
    eps: float = 0.08
    min_pts: int = 6
    stride: int = 4
    z_band: tuple = (0.03, 0.5)
    detect_range: float = 2.5
    corridor_margin: float = 0.3
    min_range: float = TOF_MIN_RANGE


def perceive(depth, intrinsics, mount, track, config):
    """Full perception stage for one depth frame.

    Returns vehicle-frame detections inside the lane corridor and the
    configured range gate.
    """
    cloud = depth_to_cloud(depth, intrinsics, config.min_range)
    if config.stride > 1 and len(cloud):
        idx = cloud.pixel_indices
        keep = ((idx // depth.width) % config.stride == 0) & \
               ((idx % depth.width) % config.stride == 0)
        from gaplab.sensing.types import PointCloud
        cloud = PointCloud(points=cloud.points[keep], frame=cloud.frame,
                           pixel_indices=idx[keep])
    cloud = sensor_to_vehicle(cloud, mount)
    if len(cloud):
        z = cloud.points[:, 2]
        planar = np.hypot(cloud.points[:, 0], cloud.points[:, 1])
        keep = (z >= config.z_band[0]) & (z <= config.z_band[1]) & \
               (planar <= config.detect_range)
        from gaplab.sensing.types import PointCloud
        cloud = PointCloud(points=cloud.points[keep], frame="vehicle",
                           pixel_indices=cloud.pixel_indices[keep])
    detections = dbscan_cluster(cloud, config.eps, config.min_pts)
    return detections


def filter_corridor(detections_world, track, config):
    """Keep world-frame detections whose centroid lies in the lane corridor."""
    limit = track.lane_half_width + config.corridor_margin
    kept = []
    for det, (wx, wy) in detections_world:
        _, lateral, _ = track.lane_query(wx, wy)
        if abs(lateral) <= limit:
            kept.append((det, (wx, wy)))
    return kept
