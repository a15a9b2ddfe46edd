"""Perception validity and gap campaigns.

Obstacle placement: static obstacles at 0.4-1.6 m, single central or
dual symmetric, viewed from a fixed pose. Camera alignment scores IoU
between the pseudo-real and mixed bounding boxes (derived from rendered
obstacle masks); LiDAR alignment compares cluster centroids. The
perception-gap battery compares 100 synchronized frame pairs per
modality pair (ViL-sim vs RW, MR vs RW).

Lane placement: lane overlays rendered at poses replayed along offset
paths (five lateral behaviors, both directions); alignment is the mean
distance between splines fitted through five per-image anchor rows.

An optional render_offset_px option shifts the simulated overlay
horizontally, emulating mount-calibration mismatch.
"""

import math
import os
from dataclasses import replace

import numpy as np

from gaplab.ads.perception import PerceptionConfig, dbscan_cluster
from gaplab.experiments.report import mean_std, write_csv, write_summary
from gaplab.geometry import Pose
from gaplab.metrics.boxes import bbox_from_mask, iou
from gaplab.metrics.clouds import cloud_stats
from gaplab.metrics.images import image_battery
from gaplab.metrics.lanes import lane_alignment
from gaplab.mixing import mix_depth, mix_rgb
from gaplab.plant import PlantParams
from gaplab.sensing import (
    DepthImage,
    RenderMask,
    RGBAImage,
    TOF_INTRINSICS,
    TOF_MIN_RANGE,
    TOF_MOUNT,
    apply_depth_noise,
    apply_rgb_noise,
    depth_to_cloud,
    noise_rng,
    render_depth,
    render_rgb,
    sensor_to_vehicle,
)
from gaplab.sensing.noise import STREAM_DEPTH, STREAM_RGB
from gaplab.sensing.render import BACKGROUND_COLOR
from gaplab.world import build_scenario

OBSTACLE_DISTANCES = (0.4, 0.8, 1.2, 1.6)
OBSTACLE_LAYOUTS = ("single", "dual")
DUAL_LATERAL = 0.22  # keeps the near placements just inside the camera FoV
CAMERA_FORWARD = 0.10  # distances are sensor-relative, like the original setup
BATTERY_PAIRS = 100
LANE_BEHAVIORS = {"center": 0.0, "left_margin": 0.40, "right_margin": -0.40,
                  "left_half": 0.20, "right_half": -0.20}
LANE_DIRECTIONS = ("CW", "CCW")
ANCHOR_ROWS = (130, 150, 170, 190, 210)


def shift_columns(image, dx):
    """Horizontal shift; vacated pixels turn transparent / no-return."""
    if dx == 0:
        return image
    data = image.data.copy()
    if isinstance(image, RGBAImage):
        fill = np.zeros(data.shape[2], dtype=data.dtype)
    else:
        fill = image.sentinel
    if dx > 0:
        data[:, dx:] = data[:, :-dx]
        data[:, :dx] = fill
    else:
        data[:, :dx] = data[:, -dx:]
        data[:, dx:] = fill
    if isinstance(image, RGBAImage):
        return RGBAImage(data)
    return DepthImage(data, max_range=image.max_range)


def obstacle_scene(base_scenario, distance, layout):
    """Vehicle parked at the preset start, obstacles placed ahead."""
    pose = base_scenario.start
    c, s = math.cos(pose.yaw), math.sin(pose.yaw)

    def ahead(d, lateral):
        d = d + CAMERA_FORWARD
        return (pose.x + c * d - s * lateral, pose.y + s * d + c * lateral)

    template = base_scenario.obstacles[0]
    if layout == "single":
        placements = [ahead(distance, 0.0)]
    else:
        placements = [ahead(distance, DUAL_LATERAL), ahead(distance, -DUAL_LATERAL)]
    obstacles = [replace(template, id=f"rq3_{k}", pose=Pose(x=x, y=y, yaw=pose.yaw))
                 for k, (x, y) in enumerate(placements)]
    return replace(base_scenario, obstacles=obstacles), placements


def synchronized_frames(scenario, pose, gap, seed, sample_index, offset_px=0):
    """(RW, MR, VIL-sim) rgb and depth frames at one pose.

    The RW frame and the MR background apply the same noise realization
    (both re-derive the generator from (seed, stream, sample_index)):
    the pseudo-real world is one frozen reality per seed, and both
    streams observe it.
    """
    rw_rgb = apply_rgb_noise(
        render_rgb(scenario, pose).over_background(BACKGROUND_COLOR),
        gap.perception, noise_rng(seed, STREAM_RGB, sample_index))
    rw_depth = apply_depth_noise(render_depth(scenario, pose),
                                 gap.perception, noise_rng(seed, STREAM_DEPTH, sample_index))

    background_rgb = apply_rgb_noise(
        render_rgb(scenario, pose, mask=RenderMask.background()).over_background(BACKGROUND_COLOR),
        gap.perception, noise_rng(seed, STREAM_RGB, sample_index))
    background_depth = apply_depth_noise(
        render_depth(scenario, pose, mask=RenderMask(obstacles=False)),
        gap.perception, noise_rng(seed, STREAM_DEPTH, sample_index))
    overlay_rgb = shift_columns(
        render_rgb(scenario, pose, mask=RenderMask.obstacles_only()), offset_px)
    overlay_depth = shift_columns(
        render_depth(scenario, pose, mask=RenderMask.obstacles_only()), offset_px)
    mr_rgb = mix_rgb(background_rgb, overlay_rgb)
    mr_depth = mix_depth(background_depth, overlay_depth)

    vil_rgb = render_rgb(scenario, pose).over_background(BACKGROUND_COLOR)
    vil_depth = render_depth(scenario, pose)
    return {
        "RW": (rw_rgb, rw_depth),
        "MR": (mr_rgb, mr_depth),
        "VIL": (vil_rgb, vil_depth),
        "overlay_rgb": overlay_rgb,
    }


def _obstacle_cluster_centroid(depth, pose, expected_vehicle_xy):
    """Centroid of the cluster nearest to the known placement (vehicle frame)."""
    cloud = depth_to_cloud(depth, TOF_INTRINSICS, TOF_MIN_RANGE)
    cloud = sensor_to_vehicle(cloud, TOF_MOUNT)
    pts = cloud.points
    keep = (pts[:, 2] >= 0.03) & (pts[:, 2] <= 0.5) & (np.hypot(pts[:, 0], pts[:, 1]) <= 2.5)
    from gaplab.sensing.types import PointCloud
    gated = PointCloud(points=pts[keep], frame="vehicle",
                       pixel_indices=cloud.pixel_indices[keep])
    cfg = PerceptionConfig()
    detections = dbscan_cluster(gated, cfg.eps, cfg.min_pts)
    if not detections:
        return None
    ex, ey = expected_vehicle_xy
    best = min(detections,
               key=lambda d: (d.centroid[0] - ex) ** 2 + (d.centroid[1] - ey) ** 2)
    if (best.centroid[0] - ex) ** 2 + (best.centroid[1] - ey) ** 2 > 0.5**2:
        return None  # nothing resembling the placed obstacle was clustered
    return np.array(best.centroid)


def run_rq3_obstacle(campaign, out_dir):
    base = build_scenario(campaign.scenario)
    offset_px = int(campaign.options.get("render_offset_px", 0))
    rows = []
    battery_rows = []
    cloud_mr, cloud_vil, ssim_wins = [], [], 0
    sample_index = 0
    pairs_done = 0
    for distance in OBSTACLE_DISTANCES:
        for layout in OBSTACLE_LAYOUTS:
            scenario, placements = obstacle_scene(base, distance, layout)
            pose = scenario.start
            from gaplab.geometry import world_to_frame
            expected = [world_to_frame(pose, px, py) for px, py in placements]
            for rep in range(campaign.repetitions):
                seed = campaign.seeds[rep % len(campaign.seeds)]
                frames = synchronized_frames(scenario, pose, campaign.gap, seed,
                                             sample_index, offset_px)
                sample_index += 1
                # camera: obstacle masks -> bounding boxes -> IoU
                rw_mask = render_rgb(scenario, pose,
                                     mask=RenderMask.obstacles_only()).alpha == 255
                mr_mask = frames["overlay_rgb"].alpha == 255
                box_rw = bbox_from_mask(rw_mask)
                box_mr = bbox_from_mask(mr_mask)
                iou_val = iou(box_rw, box_mr) if box_rw and box_mr else 0.0
                # lidar: per-placement cluster centroid distance, MR vs RW
                dists = []
                for exp in expected:
                    c_rw = _obstacle_cluster_centroid(frames["RW"][1], pose, exp)
                    c_mr = _obstacle_cluster_centroid(frames["MR"][1], pose, exp)
                    if c_rw is not None and c_mr is not None:
                        dists.append(float(np.linalg.norm(c_rw - c_mr)))
                centroid_dist = float(np.mean(dists)) if dists else float("nan")
                rows.append([distance, layout, rep, seed, iou_val, centroid_dist])

                if pairs_done < BATTERY_PAIRS:
                    rep_mr = image_battery(frames["MR"][0], frames["RW"][0])
                    rep_vil = image_battery(frames["VIL"][0], frames["RW"][0])
                    ssim_wins += rep_mr.ssim > rep_vil.ssim
                    st_mr = cloud_stats(
                        depth_to_cloud(frames["MR"][1], TOF_INTRINSICS, TOF_MIN_RANGE),
                        depth_to_cloud(frames["RW"][1], TOF_INTRINSICS, TOF_MIN_RANGE))
                    st_vil = cloud_stats(
                        depth_to_cloud(frames["VIL"][1], TOF_INTRINSICS, TOF_MIN_RANGE),
                        depth_to_cloud(frames["RW"][1], TOF_INTRINSICS, TOF_MIN_RANGE))
                    cloud_mr.append(st_mr.mean)
                    cloud_vil.append(st_vil.mean)
                    battery_rows.append([pairs_done, distance, layout,
                                         rep_mr.ssim, rep_vil.ssim,
                                         rep_mr.correlation, rep_vil.correlation,
                                         rep_mr.kl_divergence, rep_vil.kl_divergence,
                                         st_mr.mean, st_vil.mean, st_mr.max, st_vil.max,
                                         st_mr.std, st_vil.std])
                    pairs_done += 1

    write_csv(os.path.join(out_dir, "rq3_obstacle_runs.csv"),
              ["distance_m", "layout", "rep", "seed", "iou", "lidar_centroid_dist_m"],
              rows)
    write_csv(os.path.join(out_dir, "rq3_battery_pairs.csv"),
              ["pair", "distance_m", "layout", "ssim_mr", "ssim_vil",
               "corr_mr", "corr_vil", "kl_mr", "kl_vil",
               "cloud_mean_mr_m", "cloud_mean_vil_m", "cloud_max_mr_m",
               "cloud_max_vil_m", "cloud_std_mr_m", "cloud_std_vil_m"],
              battery_rows)

    lines = [f"render offset {offset_px} px, gap {campaign.gap_name}"]
    for distance in OBSTACLE_DISTANCES:
        for layout in OBSTACLE_LAYOUTS:
            sub = [r for r in rows if r[0] == distance and r[1] == layout]
            iou_m, _ = mean_std([r[4] for r in sub])
            cd_m, _ = mean_std([r[5] for r in sub if not math.isnan(r[5])])
            lines.append(f"{layout} @ {distance:.1f} m: IoU {iou_m:.3f}, "
                         f"lidar centroid dist {cd_m:.4f} m")
    if battery_rows:
        ssim_mr_m, _ = mean_std([r[3] for r in battery_rows])
        ssim_vil_m, _ = mean_std([r[4] for r in battery_rows])
        cm, _ = mean_std(cloud_mr)
        cv, _ = mean_std(cloud_vil)
        lines += [
            f"perception battery over {len(battery_rows)} pairs:",
            f"  SSIM  MR vs RW {ssim_mr_m:.4f} | VIL-sim vs RW {ssim_vil_m:.4f} "
            f"(MR higher on {ssim_wins}/{len(battery_rows)})",
            f"  cloud mean err  MR {cm:.4f} m | VIL {cv:.4f} m",
        ]
    write_summary(os.path.join(out_dir, "rq3_obstacle_summary.txt"),
                  "RQ3 obstacle placement & perception gap", lines)
    return rows, battery_rows, lines


def _lane_anchor_points(real_mask, mixed_mask, n_anchors=5):
    """Anchor both splines at the same five rows, like a per-image annotator.

    Rows are picked evenly from the rows where both masks contain lane
    pixels; the anchor is the mean marking column in that row.
    """
    rows = np.nonzero(real_mask.any(axis=1) & mixed_mask.any(axis=1))[0]
    if rows.size < n_anchors:
        return None, None
    picks = rows[np.linspace(0, rows.size - 1, n_anchors).astype(int)]
    if len(set(picks.tolist())) < n_anchors:
        return None, None
    real_anchors = []
    mixed_anchors = []
    for row in picks:
        real_anchors.append((float(np.nonzero(real_mask[row])[0].mean()), float(row)))
        mixed_anchors.append((float(np.nonzero(mixed_mask[row])[0].mean()), float(row)))
    return real_anchors, mixed_anchors


def run_rq3_lane(campaign, out_dir):
    scenario = build_scenario(campaign.scenario)
    offset_px = int(campaign.options.get("render_offset_px", 0))
    track = scenario.track
    rows = []
    skipped = 0
    for direction in LANE_DIRECTIONS:
        for behavior, lateral in LANE_BEHAVIORS.items():
            for rep in range(campaign.repetitions):
                distances = []
                for k in range(8):  # poses replayed along the offset path
                    s = 0.4 + k * 1.2
                    (cx, cy), (tx, ty) = track.point_at(s)
                    yaw = math.atan2(ty, tx)
                    if direction == "CCW":
                        yaw = yaw + math.pi
                    pose = Pose(x=cx - ty * lateral, y=cy + tx * lateral, yaw=yaw)
                    lane_mask = RenderMask(floor=False, walls=False, obstacles=False)
                    overlay = shift_columns(render_rgb(scenario, pose, mask=lane_mask),
                                            offset_px)
                    lane_real = render_rgb(scenario, pose, mask=lane_mask)
                    a_real, a_mixed = _lane_anchor_points(lane_real.alpha == 255,
                                                          overlay.alpha == 255)
                    if a_real is None:
                        skipped += 1
                        continue
                    distances.append(lane_alignment(a_real, a_mixed))
                if distances:
                    m, s_ = mean_std(distances)
                    rows.append([direction, behavior, rep, m, s_, len(distances)])
    write_csv(os.path.join(out_dir, "rq3_lane_runs.csv"),
              ["direction", "behavior", "rep", "mean_px", "std_px", "samples"],
              rows)
    lines = [f"render offset {offset_px} px; {skipped} samples without anchors skipped"]
    for direction in LANE_DIRECTIONS:
        for behavior in LANE_BEHAVIORS:
            sub = [r[3] for r in rows if r[0] == direction and r[1] == behavior]
            m, s_ = mean_std(sub)
            lines.append(f"{behavior} {direction}: {m:.3f} +/- {s_:.3f} px")
    write_summary(os.path.join(out_dir, "rq3_lane_summary.txt"),
                  "RQ3 lane placement", lines)
    return rows, lines
