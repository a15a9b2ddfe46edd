"""Drivers for scripted protocols: fixed command scripts and waypoint runs.

A driver exposes control(inputs) -> ControlCommand plus the attributes
needs_rgb / needs_depth / events / finished that the closed loop reads.
"""

import math

from gaplab.control import PidParams, PidState, PurePursuitParams, pid_speed, pure_pursuit
from gaplab.plant import STOP, ControlCommand


class ScriptedDriver:
    """Plays a time-indexed command function; finishes when it returns None."""

    needs_rgb = False
    needs_depth = False

    def __init__(self, command_fn):
        self.command_fn = command_fn
        self.events = []
        self.finished = False

    def control(self, inputs):
        cmd = self.command_fn(inputs.t, inputs.state)
        if cmd is None:
            self.finished = True
            return STOP
        return cmd


def constant_command(throttle, steering, brake=0.0):
    cmd = ControlCommand(throttle=throttle, steering=steering, brake=brake)
    return ScriptedDriver(lambda t, state: cmd)


class BrakeAtDriver:
    """Constant throttle, then full brake once the trigger distance is reached.

    Trigger uses the domain's own pose estimate: braking starts
    trigger_margin before the goal distance, measured from the start point.
    """

    needs_rgb = False
    needs_depth = False

    def __init__(self, throttle, goal_distance=2.0, trigger_margin=0.35):
        self.throttle = throttle
        self.trigger = goal_distance - trigger_margin
        self.origin = None
        self.braking = False
        self.brake_point = None
        self.events = []
        self.finished = False

    def control(self, inputs):
        pose = inputs.pose
        if self.origin is None:
            self.origin = (pose.x, pose.y)
        dist = math.hypot(pose.x - self.origin[0], pose.y - self.origin[1])
        if not self.braking and dist >= self.trigger:
            self.braking = True
            self.brake_point = dist
            self.events.append("brake_triggered")
        if self.braking:
            if inputs.speed == 0.0:
                self.finished = True
            return ControlCommand(throttle=0.0, steering=0.0, brake=1.0)
        return ControlCommand(throttle=self.throttle, steering=0.0)


class PhaseSpeedDriver:
    """PID speed control through fixed (duration, target) phases."""

    needs_rgb = False
    needs_depth = False

    def __init__(self, phases, steering, pid=None):
        self.phases = list(phases)
        self.steering = steering
        self.pid = pid or PidParams()
        self.state = PidState()
        self.events = []
        self.finished = False

    def _target(self, t):
        acc = 0.0
        for duration, target in self.phases:
            acc += duration
            if t < acc:
                return target
        return None

    def control(self, inputs):
        target = self._target(inputs.t)
        if target is None:
            self.finished = True
            return STOP
        base = ControlCommand(throttle=1.0, steering=self.steering)
        return pid_speed(target, inputs.speed, base, self.pid, self.state,
                         inputs.control_period)


class WaypointDriver:
    """Pure pursuit through an explicit waypoint list, braking at the goal."""

    needs_rgb = False
    needs_depth = False

    def __init__(self, waypoints, vehicle, pursuit=None, pid=None, target_speed=None,
                 throttle=0.365):
        self.waypoints = [(float(x), float(y)) for x, y in waypoints]
        self.vehicle = vehicle
        self.pursuit = pursuit or PurePursuitParams(cruise_throttle=throttle)
        self.pid = pid
        self.target_speed = target_speed
        self.pid_state = PidState()
        self.index = 0
        self.events = []
        self.finished = False

    def control(self, inputs):
        pose = inputs.pose
        while self.index < len(self.waypoints) - 1:
            wx, wy = self.waypoints[self.index]
            if math.hypot(wx - pose.x, wy - pose.y) < self.pursuit.lookahead:
                self.index += 1
            else:
                break
        target = self.waypoints[self.index]
        cmd = pure_pursuit(inputs.state, target, self.pursuit, self.vehicle)
        if cmd.brake == 1.0 and self.index == len(self.waypoints) - 1:
            self.finished = True
            return cmd
        if self.pid is not None and self.target_speed is not None:
            cmd = pid_speed(self.target_speed, inputs.speed, cmd, self.pid,
                            self.pid_state, inputs.control_period)
        return cmd
