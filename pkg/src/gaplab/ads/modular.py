"""Modular ADS: perception -> lattice planning -> pure pursuit + PID.

The ground-truth mode bypasses perception and feeds the scenario's
obstacle poses directly to the planner (through the same range and
corridor gates, so an obstacle-free horizon yields identical commands
in both modes).
"""

import math
from dataclasses import dataclass, field

from gaplab.ads.perception import PerceptionConfig, perceive
from gaplab.ads.planner import LatticeParams, PlannerBlocked, plan_lattice
from gaplab.control import PidParams, PidState, PurePursuitParams, pid_speed, pure_pursuit
from gaplab.geometry import frame_to_world, world_to_frame
from gaplab.plant import STOP, ControlCommand
from gaplab.sensing.types import TOF_INTRINSICS, TOF_MOUNT


@dataclass(frozen=True)
class ModularConfig:
    perception: PerceptionConfig = field(default_factory=PerceptionConfig)
    lattice: LatticeParams = field(default_factory=LatticeParams)
    pursuit: PurePursuitParams = field(default_factory=PurePursuitParams)
    pid: PidParams = field(default_factory=PidParams)
    target_speed: float = 0.5
    # perception detections persist until the vehicle has driven this far
    # past them (obstacles leave the camera FoV while being passed, and a
    # forgotten obstacle invites an early cut back onto it)
    memory_pass_margin: float = 0.6
    memory_max_age: float = 6.0
    memory_merge_radius: float = 0.30


PERCEPTION = "perception"
GROUND_TRUTH = "ground_truth"


class ModularAds:
    """Driver for the closed loop; one instance per run."""

    needs_rgb = False
    needs_depth = True

    def __init__(self, scenario, config=None, mode=PERCEPTION, plant_params=None):
        if mode not in (PERCEPTION, GROUND_TRUTH):
            raise ValueError(f"unknown mode {mode!r}")
        self.scenario = scenario
        self.config = config or ModularConfig()
        self.mode = mode
        self.plant_params = plant_params
        self.pid_state = PidState()
        self.events = []
        self.finished = False
        self.needs_depth = mode == PERCEPTION
        self._memory = []  # (wx, wy, expire_t)

    def _detections_world(self, inputs):
        cfg = self.config.perception
        track = self.scenario.track
        pose = inputs.pose
        if self.mode == GROUND_TRUTH:
            candidates = []
            for obs in self.scenario.obstacles:
                vx, vy = world_to_frame(pose, obs.pose.x, obs.pose.y)
                if math.hypot(vx, vy) <= cfg.detect_range:
                    candidates.append((obs.pose.x, obs.pose.y))
        else:
            detections = perceive(inputs.depth, TOF_INTRINSICS, TOF_MOUNT, track, cfg)
            candidates = [frame_to_world(pose, d.centroid[0], d.centroid[1])
                          for d in detections]
        limit = track.lane_half_width + cfg.corridor_margin
        gated = []
        for wx, wy in candidates:
            _, lateral, _ = track.lane_query(wx, wy)
            if abs(lateral) <= limit:
                gated.append((wx, wy))
        if self.mode == GROUND_TRUTH:
            return gated
        # refresh the short-term memory with this frame's detections;
        # entries are dropped once the vehicle is clearly past them
        merge2 = self.config.memory_merge_radius**2
        length = track.length
        _, _, s_vehicle = track.lane_query(pose.x, pose.y)
        memory = []
        for x, y, s_det, t_det in self._memory:
            behind = (s_vehicle - s_det) % length
            if behind < length / 2 and behind > self.config.memory_pass_margin:
                continue
            if inputs.t - t_det > self.config.memory_max_age:
                continue
            memory.append((x, y, s_det, t_det))
        for wx, wy in gated:
            memory = [(x, y, s, t) for x, y, s, t in memory
                      if (x - wx) ** 2 + (y - wy) ** 2 > merge2]
            _, _, s_det = track.lane_query(wx, wy)
            memory.append((wx, wy, s_det, inputs.t))
        self._memory = memory
        return [(x, y) for x, y, _, _ in memory]

    def control(self, inputs):
        detections = self._detections_world(inputs)
        try:
            waypoints = plan_lattice(self.scenario.track, inputs.state,
                                     detections, self.config.lattice)
        except PlannerBlocked:
            self.events.append("planner_blocked")
            return STOP
        target = waypoints[-1]
        for wx, wy in waypoints:
            if math.hypot(wx - inputs.pose.x, wy - inputs.pose.y) >= self.config.pursuit.lookahead:
                target = (wx, wy)
                break
        base = pure_pursuit(inputs.state, target, self.config.pursuit,
                            self.plant_params)
        return pid_speed(self.config.target_speed, inputs.speed, base,
                         self.config.pid, self.pid_state, inputs.control_period)
