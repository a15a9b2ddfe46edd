"""Reference end-to-end policy: camera pixels directly to commands.

A deterministic heuristic stand-in for a trained steering network. It
steers proportionally to the horizontal offset of the lane-marking
pixel centroid in the lower image third, pushed away from large
obstacle-colored blobs, at constant throttle. Losing the lane markings
repeats the previous command and flags a perception-loss event.
"""

from dataclasses import dataclass

import numpy as np

from gaplab.plant import ControlCommand


@dataclass(frozen=True)
class E2EParams:
    steer_gain: float = 2.4
    obstacle_gain: float = 1.0
    throttle: float = 0.345
    lane_threshold: int = 180       # min channel value for lane-marking white
    obstacle_red_margin: int = 50   # R - max(G, B) for obstacle-colored pixels
    obstacle_min_area: int = 150    # pixels
    obstacle_area_ref: int = 2500   # blob area at full repulsion strength


@dataclass
class PolicyOutput:
    command: ControlCommand
    lane_visible: bool
    obstacle_area: int


class E2EPolicy:
    """Driver for the closed loop; holds the last command for dropouts."""

    needs_rgb = True
    needs_depth = False

    def __init__(self, params=None):
        self.params = params or E2EParams()
        self.last_command = ControlCommand(throttle=self.params.throttle, steering=0.0)
        self.events = []
        self.finished = False

    def control(self, inputs):
        out = reference_policy(inputs.rgb, self.params, self.last_command)
        if not out.lane_visible:
            self.events.append("perception_loss")
        self.last_command = out.command
        return out.command


def reference_policy(image, params, last_command):
    data = image.data
    height, width = data.shape[:2]
    center_col = (width - 1) / 2.0  # symmetric masks center between pixels
    half_width = width / 2.0

    lower = data[2 * height // 3:, :, :]
    mins = lower.min(axis=2)
    lane_mask = mins >= params.lane_threshold
    if not lane_mask.any():
        return PolicyOutput(command=last_command, lane_visible=False, obstacle_area=0)
    lane_cols = np.nonzero(lane_mask)[1]
    offset_norm = (lane_cols.mean() - center_col) / half_width
    steering = params.steer_gain * offset_norm

    r = data[:, :, 0].astype(np.int16)
    gb = np.maximum(data[:, :, 1], data[:, :, 2]).astype(np.int16)
    blob = (r - gb) >= params.obstacle_red_margin
    area = int(blob.sum())
    if area >= params.obstacle_min_area:
        blob_cols = np.nonzero(blob)[1]
        strength = min(1.0, area / params.obstacle_area_ref)
        # steer away from the blob side; dead-center blobs break left
        if blob_cols.mean() >= center_col:
            steering -= params.obstacle_gain * strength
        else:
            steering += params.obstacle_gain * strength

    steering = float(min(max(steering, -1.0), 1.0))
    cmd = ControlCommand(throttle=params.throttle, steering=steering, brake=0.0)
    return PolicyOutput(command=cmd, lane_visible=True, obstacle_area=area)
