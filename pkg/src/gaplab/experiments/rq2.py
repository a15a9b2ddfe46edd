"""Actuation-gap protocols: forward, steering, braking, PID, waypoints.

Command values mirror the original study: throttle {0.34, 0.365, 0.39}
for three seconds; steering {-1.0, -0.6, -0.3, 0.3, 0.6, 1.0} at
throttle 0.365; braking triggered 0.35 m before a 2.0 m goal; PID
phases 0.4, 0.8, 0.6 and 0 m/s for ten seconds each at steering 0.6;
six waypoint path families. Runs execute in an open room so lane
bookkeeping never terminates a protocol early.
"""

import math

import numpy as np

from gaplab.experiments.report import mean_std, summarize, write_csv, write_summary
from gaplab.geometry import Pose, Spline, discrete_frechet, fit_circle
from gaplab.metrics.stats import cohens_d, mann_whitney_u
from gaplab.mixing import Modality
from gaplab.plant import ControlCommand, PlantParams
from gaplab.runtime import (
    BrakeAtDriver,
    PhaseSpeedDriver,
    ScriptedDriver,
    WaypointDriver,
    run_closed_loop,
)
from gaplab.world import ROOM_NOMINAL, Room, Scenario, Track

FORWARD_THROTTLES = (0.34, 0.365, 0.39)
FORWARD_DURATION = 3.0
STEER_VALUES = (-1.0, -0.6, -0.3, 0.3, 0.6, 1.0)
STEER_THROTTLE = 0.365
STEER_DURATION = 8.0
STEER_FIT_START = 2.0
BRAKE_GOAL = 2.0
BRAKE_TRIGGER_MARGIN = 0.35
PID_PHASES = ((10.0, 0.4), (10.0, 0.8), (10.0, 0.6), (10.0, 0.0))
PID_STEERING = 0.6

OPEN_ROOM = Room(name="open", width=14.0, depth=14.0,
                 floor_color=ROOM_NOMINAL.floor_color,
                 wall_color=ROOM_NOMINAL.wall_color,
                 floor_texture=ROOM_NOMINAL.floor_texture)


def open_scenario():
    """Large empty room for scripted actuation protocols."""
    ring = []
    for ang in range(0, 360, 30):
        a = math.radians(ang)
        ring.append((7.0 + 5.5 * math.cos(a), 7.0 + 5.5 * math.sin(a)))
    track = Track(Spline(tuple(ring), closed=True), lane_half_width=2.0,
                  margin_width=0.05, has_center_dots=False)
    return Scenario(name="OPEN", room=OPEN_ROOM, track=track, obstacles=[],
                    start=Pose(x=1.5, y=7.0, yaw=0.0), direction="CCW")


def _modalities(campaign):
    mods = [Modality.RW] + [m for m in campaign.modalities if m != Modality.RW]
    return mods


def _speed_profile(log, dt=0.01):
    xs = np.array([(r.x_real, r.y_real) for r in log.ticks])
    if len(xs) < 2:
        return np.zeros(0)
    d = np.hypot(np.diff(xs[:, 0]), np.diff(xs[:, 1]))
    return d / dt


def _distance(log):
    a, b = log.ticks[0], log.ticks[-1]
    return math.hypot(b.x_real - a.x_real, b.y_real - a.y_real)


def _stats_vs_reference(samples, reference):
    if len(samples) < 2 or len(reference) < 2:
        return float("nan"), float("nan")
    u, p = mann_whitney_u(samples, reference)
    try:
        d = cohens_d(samples, reference)
    except ValueError:
        d = 0.0
    return p, d


def run_forward(campaign, out_dir):
    sc = open_scenario()
    twin = PlantParams()
    rows = []
    profiles = {}
    for throttle in FORWARD_THROTTLES:
        for rep in range(campaign.repetitions):
            seed = campaign.seeds[rep % len(campaign.seeds)]
            for modality in _modalities(campaign):
                cmd = ControlCommand(throttle=throttle, steering=0.0)
                driver = ScriptedDriver(lambda t, s, c=cmd: c)
                log = run_closed_loop(sc, modality, driver, gap=campaign.gap,
                                      seed=seed, max_duration=FORWARD_DURATION,
                                      twin_params=twin, check_failures=False,
                                      ads_label="scripted_forward")
                dist = _distance(log)
                speeds = _speed_profile(log)
                profiles.setdefault((throttle, modality.value), []).append(speeds)
                rows.append([campaign.id, "forward", throttle, rep, seed,
                             modality.value, dist, float(speeds.mean())])
    # distance/speed errors vs the RW rows
    header = ["campaign", "protocol", "throttle", "rep", "seed", "modality",
              "distance_m", "avg_speed_mps"]
    lookup = {}
    for row in rows:
        lookup[(row[2], row[3], row[5])] = row
    for row in rows:
        ref = lookup[(row[2], row[3], "RW")]
        row.append(row[6] - ref[6])
        row.append(row[7] - ref[7])
    header += ["distance_err_vs_rw_m", "speed_err_vs_rw_mps"]
    write_csv(f"{out_dir}/rq2_forward_runs.csv", header, rows)

    lines = []
    for modality in _modalities(campaign):
        if modality == Modality.RW:
            continue
        errs = [r[8] for r in rows if r[5] == modality.value]
        m, s = mean_std(errs)
        lines.append(f"{modality.value} distance error vs RW: {m:.6g} +/- {s:.6g} m")
        # per-frame speed statistics pooled across throttles
        sample = np.concatenate([np.concatenate(profiles[(t, modality.value)])
                                 for t in FORWARD_THROTTLES])
        ref = np.concatenate([np.concatenate(profiles[(t, "RW")])
                              for t in FORWARD_THROTTLES])
        p, d = _stats_vs_reference(sample, ref)
        lines.append(f"{modality.value} speed profile vs RW: p={p:.4g} cohens_d={d:.4g}")
    write_summary(f"{out_dir}/rq2_forward_summary.txt", "RQ2 forward motion", lines)
    return rows, lines


def run_steering(campaign, out_dir):
    sc = open_scenario()
    twin = PlantParams()
    rows = []
    trajectories = {}
    for steer in STEER_VALUES:
        for rep in range(campaign.repetitions):
            seed = campaign.seeds[rep % len(campaign.seeds)]
            for modality in _modalities(campaign):
                cmd = ControlCommand(throttle=STEER_THROTTLE, steering=steer)
                driver = ScriptedDriver(lambda t, s, c=cmd: c)
                log = run_closed_loop(sc, modality, driver, gap=campaign.gap,
                                      seed=seed, max_duration=STEER_DURATION,
                                      twin_params=twin, check_failures=False,
                                      ads_label="scripted_steering")
                pts = [(r.x_real, r.y_real) for r in log.ticks
                       if r.t >= STEER_FIT_START]
                _, radius, rms = fit_circle(pts)
                trajectories[(steer, rep, modality.value)] = pts
                rows.append([campaign.id, "steering", steer, rep, seed,
                             modality.value, radius, rms])
    header = ["campaign", "protocol", "steering", "rep", "seed", "modality",
              "radius_m", "fit_rms_m"]
    lookup = {(r[2], r[3], r[5]): r for r in rows}
    for row in rows:
        ref = lookup[(row[2], row[3], "RW")]
        row.append(row[6] - ref[6])
        row.append(discrete_frechet(trajectories[(row[2], row[3], row[5])],
                                    trajectories[(row[2], row[3], "RW")]))
    header += ["radius_err_vs_rw_m", "frechet_vs_rw_m"]
    write_csv(f"{out_dir}/rq2_steering_runs.csv", header, rows)

    lines = []
    for modality in _modalities(campaign):
        if modality == Modality.RW:
            continue
        for side, pick in (("left", lambda v: v < 0), ("right", lambda v: v > 0)):
            errs = [r[8] for r in rows if r[5] == modality.value and pick(r[2])]
            fre = [r[9] for r in rows if r[5] == modality.value and pick(r[2])]
            m, s = mean_std(errs)
            fm, _ = mean_std(fre)
            lines.append(f"{modality.value} {side}-turn radius error vs RW: "
                         f"{m:.6g} +/- {s:.6g} m (frechet {fm:.6g})")
    write_summary(f"{out_dir}/rq2_steering_summary.txt", "RQ2 steering motion", lines)
    return rows, lines


def run_braking(campaign, out_dir):
    sc = open_scenario()
    twin = PlantParams()
    rows = []
    for throttle in FORWARD_THROTTLES:
        for rep in range(campaign.repetitions):
            seed = campaign.seeds[rep % len(campaign.seeds)]
            for modality in _modalities(campaign):
                driver = BrakeAtDriver(throttle=throttle, goal_distance=BRAKE_GOAL,
                                       trigger_margin=BRAKE_TRIGGER_MARGIN)
                log = run_closed_loop(sc, modality, driver, gap=campaign.gap,
                                      seed=seed, max_duration=30.0,
                                      twin_params=twin, check_failures=False,
                                      ads_label="scripted_braking")
                trigger_tick = next((r for r in log.ticks if "brake_triggered" in r.event), None)
                if trigger_tick is None:
                    continue
                end = log.ticks[-1]
                braking_distance = math.hypot(end.x_real - trigger_tick.x_real,
                                              end.y_real - trigger_tick.y_real)
                speeds = _speed_profile(log)
                idx = trigger_tick.tick
                approach = float(speeds[max(idx - 5, 0):idx].mean()) if idx > 1 else 0.0
                decel = approach**2 / (2 * braking_distance) if braking_distance > 0 else 0.0
                rows.append([campaign.id, "braking", throttle, rep, seed,
                             modality.value, braking_distance, approach, decel])
    header = ["campaign", "protocol", "throttle", "rep", "seed", "modality",
              "braking_distance_m", "approach_speed_mps", "mean_decel_mps2"]
    lookup = {(r[2], r[3], r[5]): r for r in rows}
    for row in rows:
        ref = lookup.get((row[2], row[3], "RW"))
        row.append(row[6] - ref[6] if ref else float("nan"))
    header.append("braking_distance_err_vs_rw_m")
    write_csv(f"{out_dir}/rq2_braking_runs.csv", header, rows)

    lines = []
    for modality in _modalities(campaign):
        if modality == Modality.RW:
            continue
        errs = [r[9] for r in rows if r[5] == modality.value]
        m, s = mean_std(errs)
        lines.append(f"{modality.value} braking distance error vs RW: {m:.6g} +/- {s:.6g} m")
    write_summary(f"{out_dir}/rq2_braking_summary.txt", "RQ2 braking motion", lines)
    return rows, lines


def run_pid(campaign, out_dir):
    sc = open_scenario()
    twin = PlantParams()
    rows = []
    total = sum(d for d, _ in PID_PHASES)
    for rep in range(campaign.repetitions):
        seed = campaign.seeds[rep % len(campaign.seeds)]
        for modality in _modalities(campaign):
            driver = PhaseSpeedDriver(PID_PHASES, steering=PID_STEERING)
            log = run_closed_loop(sc, modality, driver, gap=campaign.gap,
                                  seed=seed, max_duration=total + 1.0,
                                  twin_params=twin, check_failures=False,
                                  ads_label="scripted_pid")
            speeds = _speed_profile(log)
            t0 = 0.0
            for phase_idx, (duration, target) in enumerate(PID_PHASES):
                lo = int((t0 + duration / 2) * 100)  # settled half of the phase
                hi = int((t0 + duration) * 100) - 1
                seg = speeds[lo:min(hi, len(speeds))]
                err = float(np.abs(seg - target).mean()) if seg.size else float("nan")
                rows.append([campaign.id, "pid", phase_idx, target, rep, seed,
                             modality.value, err])
                t0 += duration
    header = ["campaign", "protocol", "phase", "target_mps", "rep", "seed",
              "modality", "mean_abs_speed_err_mps"]
    write_csv(f"{out_dir}/rq2_pid_runs.csv", header, rows)
    lines = []
    for modality in _modalities(campaign):
        errs = [r[7] for r in rows if r[6] == modality.value and r[3] > 0]
        m, s = mean_std(errs)
        lines.append(f"{modality.value} mean speed tracking error: {m:.6g} +/- {s:.6g} m/s")
    write_summary(f"{out_dir}/rq2_pid_summary.txt", "RQ2 PID speed control", lines)
    return rows, lines


def waypoint_paths():
    """Six path families from simple to complex, in the start frame."""
    def arc(radius, total_deg, steps=8, left=True):
        pts = []
        sign = 1.0 if left else -1.0
        for k in range(1, steps + 1):
            a = math.radians(total_deg) * k / steps
            pts.append((radius * math.sin(a), sign * radius * (1 - math.cos(a))))
        return pts

    s_first = arc(1.2, 60, left=True)
    end_x, end_y = s_first[-1]
    s_second = [(end_x + dx, end_y - dy) for dx, dy in
                [(p[0], -p[1]) for p in arc(1.2, 60, left=False)]]
    return {
        "single_close": [(1.0, 0.0)],
        "single_far": [(3.0, 0.0)],
        "straight": [(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)],
        "wide_turn": arc(1.5, 90, left=True),
        "sharp_turn": arc(0.8, 90, left=False),
        "s_shape": s_first + s_second,
    }


def run_waypoints(campaign, out_dir):
    sc = open_scenario()
    twin = PlantParams()
    paths = waypoint_paths()
    rows = []
    trajectories = {}
    for family, rel_points in paths.items():
        world = [(sc.start.x + x, sc.start.y + y) for x, y in rel_points]
        for rep in range(campaign.repetitions):
            seed = campaign.seeds[rep % len(campaign.seeds)]
            for modality in _modalities(campaign):
                driver = WaypointDriver(world, vehicle=twin, throttle=0.365)
                log = run_closed_loop(sc, modality, driver, gap=campaign.gap,
                                      seed=seed, max_duration=40.0,
                                      twin_params=twin, check_failures=False,
                                      ads_label="scripted_waypoints")
                pts = [(r.x_real, r.y_real) for r in log.ticks]
                trajectories[(family, rep, modality.value)] = pts
                rows.append([campaign.id, "waypoint", family, rep, seed,
                             modality.value, log.outcome.type, log.outcome.t])
    header = ["campaign", "protocol", "family", "rep", "seed", "modality",
              "outcome", "duration_s"]
    for row in rows:
        ref = trajectories[(row[2], row[3], "RW")]
        row.append(discrete_frechet(trajectories[(row[2], row[3], row[5])], ref))
    header.append("frechet_vs_rw_m")
    write_csv(f"{out_dir}/rq2_waypoint_runs.csv", header, rows)
    lines = []
    for modality in _modalities(campaign):
        if modality == Modality.RW:
            continue
        for family in paths:
            fre = [r[8] for r in rows if r[5] == modality.value and r[2] == family]
            m, s = mean_std(fre)
            lines.append(f"{modality.value} {family}: frechet vs RW {m:.6g} +/- {s:.6g} m")
    write_summary(f"{out_dir}/rq2_waypoint_summary.txt", "RQ2 waypoint following", lines)
    return rows, lines


RQ2_PROTOCOLS = {
    "rq2_forward": run_forward,
    "rq2_steer": run_steering,
    "rq2_brake": run_braking,
    "rq2_pid": run_pid,
    "rq2_waypoint": run_waypoints,
}


def run_rq2(campaign, out_dir):
    return RQ2_PROTOCOLS[campaign.id](campaign, out_dir)
