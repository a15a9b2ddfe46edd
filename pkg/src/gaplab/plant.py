"""Vehicle dynamics: the ideal kinematic twin and the pseudo-real plant.

Kinematic bicycle model with throttle deadzone, linear drag and brake
deceleration. Speed follows the linear ODE  dv/dt = a - drag * v  with a
constant within one tick, integrated exactly; heading and position use
the exact constant-curvature arc for the distance traveled in the tick,
so constant-steering trajectories are exact circles of radius
wheelbase / tan(steering_angle) regardless of the tick size.

Sign conventions: steering commands are negative for left turns (the
command boundary negates them, so a -1.0 command yields a positive,
counter-clockwise road-wheel angle of max_steer * steer_scale_left).
"""

import math
from dataclasses import dataclass, field, replace

from gaplab.geometry import Pose, normalize_angle

_CURVATURE_EPS = 1e-12


@dataclass(frozen=True)
class ControlCommand:
    throttle: float
    steering: float
    brake: float = 0.0
    timestamp: float = 0.0

    def __post_init__(self):
        for name, lo, hi in (("throttle", 0.0, 1.0), ("steering", -1.0, 1.0),
                             ("brake", 0.0, 1.0)):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or math.isnan(v) or not lo <= v <= hi:
                raise ValueError(f"{name}={v!r} outside [{lo}, {hi}]")


STOP = ControlCommand(throttle=0.0, steering=0.0, brake=1.0)


@dataclass(frozen=True)
class VehicleState:
    pose: Pose
    speed: float = 0.0
    steering_angle: float = 0.0

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("speed must be non-negative")


@dataclass(frozen=True)
class PlantParams:
    wheelbase: float = 0.25
    max_steer: float = 0.35
    throttle_gain: float = 220.0
    throttle_deadzone: float = 0.33
    drag: float = 8.0
    brake_decel: float = 3.0
    command_latency: float = 0.0
    steer_scale_left: float = 1.0
    steer_scale_right: float = 1.0

    def __post_init__(self):
        if self.wheelbase <= 0:
            raise ValueError("wheelbase must be positive")
        if not 0 <= self.throttle_deadzone < 1:
            raise ValueError("deadzone must lie in [0, 1)")
        if self.steer_scale_left <= 0 or self.steer_scale_right <= 0:
            raise ValueError("steer scales must be positive")


@dataclass(frozen=True)
class ActuationGap:
    """Multiplicative/additive deltas applied to the twin's parameters."""

    throttle_gain_scale: float = 1.0
    deadzone_delta: float = 0.0
    drag_scale: float = 1.0
    brake_decel_scale: float = 1.0
    steer_scale_left: float = 1.0
    steer_scale_right: float = 1.0
    extra_latency: float = 0.0

    @property
    def is_zero(self):
        return self == ActuationGap()


@dataclass(frozen=True)
class PerceptionGap:
    """Pseudo-real sensor corruption: per-channel noise, dropout, exposure."""

    rgb_sigma: float = 0.0
    exposure_offset: float = 0.0
    depth_sigma: float = 0.0
    depth_dropout: float = 0.0

    @property
    def is_zero(self):
        return self == PerceptionGap()


@dataclass(frozen=True)
class GapProfile:
    actuation: ActuationGap = field(default_factory=ActuationGap)
    perception: PerceptionGap = field(default_factory=PerceptionGap)

    @property
    def is_zero(self):
        return self.actuation.is_zero and self.perception.is_zero


ZERO_GAP = GapProfile()


def make_pseudo_real(twin, gap):
    """Twin parameters perturbed by the actuation gap; zero gap is the identity."""
    a = gap.actuation
    return replace(
        twin,
        throttle_gain=twin.throttle_gain * a.throttle_gain_scale,
        throttle_deadzone=twin.throttle_deadzone + a.deadzone_delta,
        drag=twin.drag * a.drag_scale,
        brake_decel=twin.brake_decel * a.brake_decel_scale,
        steer_scale_left=twin.steer_scale_left * a.steer_scale_left,
        steer_scale_right=twin.steer_scale_right * a.steer_scale_right,
        command_latency=twin.command_latency + a.extra_latency,
    )


def steering_angle_from_command(params, steering_cmd):
    """Counter-clockwise road-wheel angle for a [-1, 1] steering command."""
    scale = params.steer_scale_left if steering_cmd < 0 else params.steer_scale_right
    return -params.max_steer * scale * steering_cmd


def step(state, cmd, params, dt):
    """Advance one tick. Pure function; latency is handled by Plant."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    delta = steering_angle_from_command(params, cmd.steering)
    accel = (params.throttle_gain * max(0.0, cmd.throttle - params.throttle_deadzone)
             - params.brake_decel * cmd.brake)

    v0 = state.speed
    if params.drag > 0:
        veq = accel / params.drag
        decay = math.exp(-params.drag * dt)
        v1 = veq + (v0 - veq) * decay
        if v1 < 0.0:
            # find the zero crossing, coast the remainder at rest
            t_star = math.log((v0 - veq) / (0.0 - veq)) / params.drag
            t_star = min(max(t_star, 0.0), dt)
            dist = veq * t_star + (v0 - veq) * (1.0 - math.exp(-params.drag * t_star)) / params.drag
            v1 = 0.0
        else:
            dist = veq * dt + (v0 - veq) * (1.0 - decay) / params.drag
    else:
        v1 = v0 + accel * dt
        if v1 < 0.0:
            t_star = v0 / -accel if accel < 0 else 0.0
            dist = v0 * t_star + 0.5 * accel * t_star * t_star
            v1 = 0.0
        else:
            dist = v0 * dt + 0.5 * accel * dt * dt
    dist = max(dist, 0.0)

    yaw0 = state.pose.yaw
    kappa = math.tan(delta) / params.wheelbase
    dyaw = kappa * dist
    if abs(kappa) < _CURVATURE_EPS:
        nx = state.pose.x + dist * math.cos(yaw0)
        ny = state.pose.y + dist * math.sin(yaw0)
    else:
        nx = state.pose.x + (math.sin(yaw0 + dyaw) - math.sin(yaw0)) / kappa
        ny = state.pose.y - (math.cos(yaw0 + dyaw) - math.cos(yaw0)) / kappa

    pose = Pose(x=nx, y=ny, z=state.pose.z, yaw=normalize_angle(yaw0 + dyaw),
                timestamp=state.pose.timestamp + dt)
    return VehicleState(pose=pose, speed=v1, steering_angle=delta)


class Plant:
    """Single-owner stateful wrapper adding the command latency delay line."""

    def __init__(self, params, initial_pose, dt):
        self.params = params
        self.dt = dt
        self.state = VehicleState(pose=initial_pose, speed=0.0)
        n_delay = math.ceil(params.command_latency / dt - 1e-9) if params.command_latency > 0 else 0
        self._delay = [STOP] * n_delay

    def step(self, cmd):
        if self._delay:
            self._delay.append(cmd)
            cmd = self._delay.pop(0)
        self.state = step(self.state, cmd, self.params, self.dt)
        return self.state

    @property
    def pose(self):
        return self.state.pose

    @property
    def speed(self):
        return self.state.speed


def turning_radius(params, steering_cmd):
    """Closed-form steady-state turning radius for a constant command."""
    delta = steering_angle_from_command(params, steering_cmd)
    if abs(math.tan(delta)) < _CURVATURE_EPS:
        return math.inf
    return params.wheelbase / abs(math.tan(delta))
