from gaplab.metrics.behavior import BehaviorMetrics, evaluate_run, trajectory_for_compare
from gaplab.metrics.boxes import bbox_from_mask, iou
from gaplab.metrics.clouds import CloudDistanceStats, EmptyCorrespondenceError, cloud_stats
from gaplab.metrics.images import ImageMetricReport, PerceptualPlugin, image_battery, ssim
from gaplab.metrics.lanes import lane_alignment, sample_lane_spline
from gaplab.metrics.stats import UndefinedEffectError, cohens_d, mann_whitney_u

__all__ = [
    "BehaviorMetrics", "evaluate_run", "trajectory_for_compare",
    "bbox_from_mask", "iou",
    "CloudDistanceStats", "EmptyCorrespondenceError", "cloud_stats",
    "ImageMetricReport", "PerceptualPlugin", "image_battery", "ssim",
    "lane_alignment", "sample_lane_spline",
    "UndefinedEffectError", "cohens_d", "mann_whitney_u",
]
