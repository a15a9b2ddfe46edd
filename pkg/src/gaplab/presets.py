"""Named gap profiles.

paper_rq2 encodes the aggregate actuation deltas reported for the
physical platform (forward travel +0.87 m over 3 s, left turn radius
+0.81 m, right +0.16 m, braking distance +0.02 m relative to the twin);
the scales below were calibrated against the default twin parameters so
the pseudo-real plant reproduces those deltas by construction. They are
constructed values, not hardware measurements.

perception_heavy is the perception-dominant profile used for the
directional behavior-gap studies; perception_crash exaggerates depth
noise until DBSCAN clustering falls apart on the pseudo-real side,
which is the failure source the ablation study isolates.
"""

from gaplab.plant import ActuationGap, GapProfile, PerceptionGap

# calibrated against PlantParams() defaults; see tests/test_presets.py
RQ2_THROTTLE_GAIN_SCALE = 0.6856013551670892
RQ2_STEER_SCALE_LEFT = 0.4734407102604465
RQ2_STEER_SCALE_RIGHT = 0.8219763856094631
RQ2_BRAKE_DECEL_SCALE = 0.006844317498095876

GAP_PRESETS = {
    "zero": GapProfile(),
    "paper_rq2": GapProfile(
        actuation=ActuationGap(
            throttle_gain_scale=RQ2_THROTTLE_GAIN_SCALE,
            steer_scale_left=RQ2_STEER_SCALE_LEFT,
            steer_scale_right=RQ2_STEER_SCALE_RIGHT,
            brake_decel_scale=RQ2_BRAKE_DECEL_SCALE,
        ),
    ),
    "perception_heavy": GapProfile(
        actuation=ActuationGap(
            throttle_gain_scale=0.97,
            steer_scale_left=0.96,
            steer_scale_right=1.03,
        ),
        perception=PerceptionGap(
            rgb_sigma=12.0,
            exposure_offset=18.0,
            depth_sigma=0.05,
            depth_dropout=0.35,
        ),
    ),
    "sensor_noise": GapProfile(
        perception=PerceptionGap(
            rgb_sigma=25.0,
            exposure_offset=22.0,
            depth_sigma=0.05,
            depth_dropout=0.35,
        ),
    ),
    "perception_crash": GapProfile(
        perception=PerceptionGap(
            rgb_sigma=8.0,
            depth_sigma=0.05,
            depth_dropout=0.80,
        ),
    ),
}


def gap_preset(name):
    if name not in GAP_PRESETS:
        raise LookupError(f"unknown gap preset {name!r}; known: {sorted(GAP_PRESETS)}")
    return GAP_PRESETS[name]
