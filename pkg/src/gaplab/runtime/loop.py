"""Deterministic lockstep closed loop.

One run advances simulated time in fixed 1/sim_tick steps with no
wall-clock coupling. At sensor ticks the perception pair is composed
according to the modality wiring; at control ticks the driver turns the
latest frames into a command; every tick the driven plant integrates
and termination conditions are checked (first event wins, checked in
the order crash, out-of-road, planner-blocked, completed, timeout).

Per-frame sensor noise comes from counter-based streams keyed by
(seed, stream, frame index) so the pseudo-real "reality" is one frozen
realization per seed, shared by every modality that touches it.
"""

import hashlib
import json
import os
from dataclasses import asdict, dataclass

from gaplab import __version__
from gaplab.geometry import Pose
from gaplab.mixing import Modality, SimWorld, WIRING, mix_depth, mix_rgb
from gaplab.plant import GapProfile, Plant, PlantParams, STOP, make_pseudo_real
from gaplab.runtime.rates import RateConfig
from gaplab.runtime.runlog import (
    COMPLETED,
    CRASH,
    FrameDigest,
    OUT_OF_ROAD,
    Outcome,
    PLANNER_BLOCKED,
    RunLog,
    TIMEOUT,
    TickRecord,
    digest_bytes,
)
from gaplab.sensing.io import write_depth, write_ppm
from gaplab.sensing.noise import STREAM_DEPTH, STREAM_RGB, apply_depth_noise, apply_rgb_noise, noise_rng
from gaplab.sensing.render import BACKGROUND_COLOR, render_depth, render_rgb
from gaplab.sensing.types import RenderMask
from gaplab.world import collision_query, scenario_to_dict


@dataclass(frozen=True)
class ControlInputs:
    rgb: object
    depth: object
    state: object
    tick: int
    t: float
    control_period: float

    @property
    def pose(self):
        return self.state.pose

    @property
    def speed(self):
        return self.state.speed


def scenario_hash(scenario):
    payload = json.dumps(scenario_to_dict(scenario), sort_keys=True).encode()
    return hashlib.sha256(payload).hexdigest()[:16]


def _wrap_arc_delta(s_now, s_prev, length):
    return (s_now - s_prev + length / 2.0) % length - length / 2.0


class _FrameComposer:
    """Produces the per-sensor-tick perception pair for one wiring."""

    def __init__(self, scenario, sim_world, wiring, gap, seed, needs_rgb, needs_depth):
        self.scenario = scenario
        self.sim_world = sim_world
        self.wiring = wiring
        self.gap = gap.perception
        self.seed = seed
        self.needs_rgb = needs_rgb
        self.needs_depth = needs_depth

    def _real_rgb(self, pose, frame_index, mask):
        raw = render_rgb(self.scenario, pose, mask=mask).over_background(BACKGROUND_COLOR)
        return apply_rgb_noise(raw, self.gap, noise_rng(self.seed, STREAM_RGB, frame_index))

    def _real_depth(self, pose, frame_index, mask):
        raw = render_depth(self.scenario, pose, mask=mask)
        return apply_depth_noise(raw, self.gap, noise_rng(self.seed, STREAM_DEPTH, frame_index))

    def compose(self, real_pose, frame_index):
        source = self.wiring.perception_source
        rgb = depth = None
        if source == "sim":
            sim_pose = self.sim_world.vehicle_pose
            if self.needs_rgb:
                rgb = render_rgb(self.sim_world.scenario, sim_pose).over_background(BACKGROUND_COLOR)
            if self.needs_depth:
                depth = render_depth(self.sim_world.scenario, sim_pose)
        elif source == "real":
            if self.needs_rgb:
                rgb = self._real_rgb(real_pose, frame_index, RenderMask.full())
            if self.needs_depth:
                depth = self._real_depth(real_pose, frame_index, RenderMask.full())
        elif source == "mixed":
            sim_pose = self.sim_world.vehicle_pose
            if self.needs_rgb:
                background = self._real_rgb(real_pose, frame_index, RenderMask.background())
                overlay = render_rgb(self.sim_world.scenario, sim_pose,
                                     mask=RenderMask.obstacles_only())
                rgb = mix_rgb(background, overlay)
            if self.needs_depth:
                background = self._real_depth(real_pose, frame_index,
                                              RenderMask(obstacles=False))
                overlay = render_depth(self.sim_world.scenario, sim_pose,
                                       mask=RenderMask.obstacles_only())
                depth = mix_depth(background, overlay)
        else:
            raise ValueError(f"unknown perception source {source!r}")
        return rgb, depth


def build_header(scenario, modality, ads_label, gap, seed, rates, twin, active,
                 max_duration):
    return {
        "version": __version__,
        "scenario": scenario.name,
        "scenario_hash": scenario_hash(scenario),
        "modality": modality.value,
        "ads": ads_label,
        "seed": int(seed),
        "max_duration": max_duration,
        "gap": asdict(gap),
        "rates": asdict(rates),
        "twin_params": asdict(twin),
        "active_params": asdict(active),
        "background_color": list(BACKGROUND_COLOR),
    }


def run_closed_loop(scenario, modality, driver, gap=None, seed=0,
                    rates=None, max_duration=60.0, twin_params=None,
                    ads_label=None, frames_dir=None, check_failures=True,
                    frame_index_base=0):
    """Execute one closed-loop run and return its RunLog."""
    if not isinstance(modality, Modality):
        modality = Modality(modality)
    gap = gap if gap is not None else GapProfile()
    rates = rates or RateConfig()
    twin = twin_params or PlantParams()
    if max_duration <= 0:
        raise ValueError("max_duration must be positive")

    wiring = WIRING[modality]
    real_params = make_pseudo_real(twin, gap)
    active = twin if wiring.plant == "twin" else real_params
    plant = Plant(active, scenario.start.with_timestamp(0.0), rates.dt)
    sim_world = SimWorld(scenario)
    composer = _FrameComposer(scenario, sim_world, wiring, gap, seed,
                              getattr(driver, "needs_rgb", False),
                              getattr(driver, "needs_depth", False))
    header = build_header(scenario, modality, ads_label or type(driver).__name__,
                          gap, seed, rates, twin, active, max_duration)
    log = RunLog(header=header)
    if frames_dir:
        os.makedirs(frames_dir, exist_ok=True)

    track = scenario.track
    length = track.length
    _, _, s_prev = track.lane_query(plant.pose.x, plant.pose.y)
    progress = 0.0
    rgb = depth = None
    cmd = STOP
    frame_index = 0
    max_ticks = int(round(max_duration * rates.sim_tick))
    outcome = None

    sim_active = wiring.pose_injection or wiring.perception_source == "sim"
    tracking_period = rates.sim_tick // rates.tracking_rate

    for tick in range(max_ticks):
        if tick % rates.sensor_period == 0:
            rgb, depth = composer.compose(plant.pose, frame_index_base + frame_index)
            log.digests.append(FrameDigest(
                frame=frame_index, tick=tick,
                rgb_sha256=digest_bytes(rgb.tobytes()) if rgb is not None else "",
                depth_sha256=digest_bytes(depth.tobytes()) if depth is not None else ""))
            if frames_dir:
                if rgb is not None:
                    write_ppm(rgb, os.path.join(frames_dir, f"rgb_{frame_index:06d}.ppm"))
                if depth is not None:
                    write_depth(depth, os.path.join(frames_dir, f"depth_{frame_index:06d}.dpth"))
            frame_index += 1

        events = []
        if tick % rates.control_period == 0:
            inputs = ControlInputs(rgb=rgb, depth=depth, state=plant.state,
                                   tick=tick, t=tick * rates.dt,
                                   control_period=rates.control_dt)
            cmd = driver.control(inputs)
            if getattr(driver, "events", None):
                events.extend(driver.events)
                driver.events.clear()

        state = plant.step(cmd)
        pose = state.pose

        # tracking broadcast: slave the simulator to the driven plant's pose
        # (per tick at the default 100 Hz tracking rate, post-integration,
        # so the next sensor tick renders at exactly the tracked pose)
        if sim_active and (tick + 1) % tracking_period == 0:
            mirrored = scenario.obstacles if wiring.obstacle_mirroring else ()
            sim_world.inject_pose(plant.pose, mirrored)

        inside, lateral, s_now = track.lane_query(pose.x, pose.y)
        progress += _wrap_arc_delta(s_now, s_prev, length)
        s_prev = s_now

        terminal = None
        if check_failures:
            hit = collision_query(pose, scenario.vehicle, scenario.obstacles)
            if hit is not None:
                events.append(f"crash:{hit}")
                terminal = (CRASH, hit)
            elif not inside:
                events.append("out_of_road")
                terminal = (OUT_OF_ROAD, "")
        if terminal is None and "planner_blocked" in events:
            terminal = (PLANNER_BLOCKED, "")
        if terminal is None and progress >= length:
            events.append("lap_completed")
            terminal = (COMPLETED, "")
        if terminal is None and getattr(driver, "finished", False):
            events.append("driver_finished")
            terminal = (COMPLETED, "")

        twin_pose = sim_world.vehicle_pose if sim_active else pose
        log.ticks.append(TickRecord(
            tick=tick, t=pose.timestamp, throttle=cmd.throttle,
            steering=cmd.steering, brake=cmd.brake,
            x_twin=twin_pose.x, y_twin=twin_pose.y, yaw_twin=twin_pose.yaw,
            x_real=pose.x, y_real=pose.y, yaw_real=pose.yaw,
            event=";".join(events)))

        if terminal is not None:
            outcome = Outcome(type=terminal[0], detail=terminal[1], tick=tick,
                              t=pose.timestamp, arc_position=s_now, progress=progress,
                              completion_pct=min(max(progress / length, 0.0), 1.0) * 100.0)
            break

    if outcome is None:
        pose = plant.pose
        _, _, s_now = track.lane_query(pose.x, pose.y)
        outcome = Outcome(type=TIMEOUT, detail="", tick=max_ticks - 1, t=pose.timestamp,
                          arc_position=s_now, progress=progress,
                          completion_pct=min(max(progress / length, 0.0), 1.0) * 100.0)
    log.outcome = outcome
    return log
