"""Waypoint follower (pure pursuit) and PID speed controller.

Shared by the modular ADS and the scripted command protocols. Steering
commands are negative-left (see plant module); a target to the left of
the heading therefore produces a negative steering command.
"""

import math
from dataclasses import dataclass

from gaplab.geometry import normalize_angle
from gaplab.plant import ControlCommand


@dataclass(frozen=True)
class PurePursuitParams:
    lookahead: float = 0.3
    goal_tolerance: float = 0.05
    cruise_throttle: float = 1.0

    def __post_init__(self):
        if self.lookahead <= 0 or self.goal_tolerance <= 0:
            raise ValueError("lookahead and goal_tolerance must be positive")


@dataclass(frozen=True)
class PidParams:
    """Throttle-multiplier PID.

    The paper-style controller holds base throttle at 1.0 and scales it
    by clamp(kp*e + ki*int(e) + kd*de/dt, 0, 1). Gains are frozen here:
    the plant's quasi-static speed gain is ~27 (m/s per multiplier unit),
    so kp must stay well below 1/27 for a stable 20 Hz loop.
    """

    kp: float = 0.025
    ki: float = 0.40
    kd: float = 0.0
    integral_clamp: float = 0.5
    multiplier_range: tuple = (0.0, 1.0)

    def __post_init__(self):
        if min(self.kp, self.ki, self.kd) < 0:
            raise ValueError("gains must be non-negative")


@dataclass
class PidState:
    integral_term: float = 0.0  # running value of ki * integral(e)
    prev_error: float = 0.0
    initialized: bool = False


def pure_pursuit(state, target, params, vehicle):
    """Steer toward a world-frame target point; brake inside goal_tolerance."""
    tx, ty = float(target[0]), float(target[1])
    if not (math.isfinite(tx) and math.isfinite(ty)):
        raise ValueError("target must be finite")
    dx = tx - state.pose.x
    dy = ty - state.pose.y
    dist = math.hypot(dx, dy)
    if dist <= params.goal_tolerance:
        return ControlCommand(throttle=0.0, steering=0.0, brake=1.0,
                              timestamp=state.pose.timestamp)
    alpha = normalize_angle(math.atan2(dy, dx) - state.pose.yaw)
    d_eff = max(dist, params.lookahead)
    desired = math.atan(2.0 * vehicle.wheelbase * math.sin(alpha) / d_eff)
    steering = min(max(-desired / vehicle.max_steer, -1.0), 1.0)
    return ControlCommand(throttle=params.cruise_throttle, steering=steering,
                          brake=0.0, timestamp=state.pose.timestamp)


def pid_speed(target_speed, measured_speed, base_cmd, params, pid_state, dt):
    """Wrap a base command's throttle with the speed-holding multiplier.

    A zero target is the stop phase: full brake, throttle cut. Returns
    the modified command; pid_state is updated in place.
    """
    if target_speed < 0 or measured_speed < 0:
        raise ValueError("speeds must be non-negative")
    if target_speed == 0.0:
        pid_state.integral_term = 0.0
        pid_state.prev_error = 0.0
        pid_state.initialized = False
        return ControlCommand(throttle=0.0, steering=base_cmd.steering, brake=1.0,
                              timestamp=base_cmd.timestamp)

    error = target_speed - measured_speed
    pid_state.integral_term = min(max(pid_state.integral_term + params.ki * error * dt,
                                      -params.integral_clamp), params.integral_clamp)
    derivative = 0.0 if not pid_state.initialized else (error - pid_state.prev_error) / dt
    pid_state.prev_error = error
    pid_state.initialized = True

    lo, hi = params.multiplier_range
    multiplier = min(max(params.kp * error + pid_state.integral_term
                         + params.kd * derivative, lo), hi)
    return ControlCommand(throttle=base_cmd.throttle * multiplier,
                          steering=base_cmd.steering, brake=base_cmd.brake,
                          timestamp=base_cmd.timestamp)
