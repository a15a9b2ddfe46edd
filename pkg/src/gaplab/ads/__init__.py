from gaplab.ads.e2e import E2EParams, E2EPolicy, reference_policy
from gaplab.ads.modular import GROUND_TRUTH, PERCEPTION, ModularAds, ModularConfig
from gaplab.ads.perception import ObstacleDetection, PerceptionConfig, dbscan_cluster, perceive
from gaplab.ads.planner import LatticeParams, PlannerBlocked, plan_lattice
from gaplab.ads.plugin import PolicyPlugin

__all__ = [
    "E2EParams", "E2EPolicy", "reference_policy",
    "GROUND_TRUTH", "PERCEPTION", "ModularAds", "ModularConfig",
    "ObstacleDetection", "PerceptionConfig", "dbscan_cluster", "perceive",
    "LatticeParams", "PlannerBlocked", "plan_lattice",
    "PolicyPlugin",
]
