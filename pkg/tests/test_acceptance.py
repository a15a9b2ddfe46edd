"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
pass lines. Tolerances are pinned here and nowhere else.
"""

import functools
import itertools
import math
import time

import numpy as np
import pytest

from gaplab import _kernels
from gaplab.ads import E2EPolicy, GROUND_TRUTH, ModularAds, PERCEPTION
from gaplab.experiments import Campaign, run_rq2, synchronized_frames
from gaplab.experiments.rq3 import obstacle_scene
from gaplab.geometry import Pose, discrete_frechet, fit_circle
from gaplab.metrics import (
    cloud_stats,
    cohens_d,
    image_battery,
    iou,
    mann_whitney_u,
    trajectory_for_compare,
)
from gaplab.mixing import Modality, mix_depth, mix_rgb
from gaplab.plant import ControlCommand, GapProfile, PlantParams
from gaplab.presets import gap_preset
from gaplab.runtime import (
    decode_tracking,
    encode_tracking,
    run_closed_loop,
    save_runlog,
    udp_demo_bridge,
)
from gaplab.runtime.drivers import ScriptedDriver
from gaplab.sensing import (
    DepthImage,
    PointCloud,
    RGBAImage,
    RGBImage,
    TOF_INTRINSICS,
    TOF_MAX_RANGE,
    TOF_MIN_RANGE,
    depth_to_cloud,
    project_points,
)
from gaplab.world import build_scenario

SENTINEL = np.float32(TOF_MAX_RANGE + 1.0)


def verdict(number, text):
    print(f"\n[PASS] criterion {number}: {text}")


def timed(budget_s):
    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            t0 = time.perf_counter()
            fn(*args, **kwargs)
            elapsed = time.perf_counter() - t0
            assert elapsed < budget_s, f"runtime {elapsed:.1f}s exceeds {budget_s}s budget"
        return inner
    return wrap


@timed(1.0)
def test_criterion_01_pinhole_reprojection():
    rng = np.random.default_rng(100)
    n = 10_000
    i = rng.uniform(0, TOF_INTRINSICS.width - 1, n)
    j = rng.uniform(0, TOF_INTRINSICS.height - 1, n)
    z = rng.uniform(TOF_MIN_RANGE, TOF_MAX_RANGE, n)
    x = (i - TOF_INTRINSICS.cx) * z / TOF_INTRINSICS.fx
    y = (j - TOF_INTRINSICS.cy) * z / TOF_INTRINSICS.fy
    ii, jj, zz = project_points(np.column_stack([x, y, z]), TOF_INTRINSICS)
    err = max(np.abs(ii - i).max(), np.abs(jj - j).max(), np.abs(zz - z).max())
    assert err < 1e-6
    verdict(1, f"pinhole round trip over 10^4 samples, max error {err:.2e}")


@timed(5.0)
def test_criterion_02_mixing_exactness():
    rng = np.random.default_rng(101)
    for _ in range(100):
        a = rng.uniform(0.1, 6.0, size=(24, 32)).astype(np.float32)
        b = rng.uniform(0.1, 6.0, size=(24, 32)).astype(np.float32)
        mixed = mix_depth(DepthImage(a), DepthImage(b))
        oracle = np.empty_like(a)
        for r in range(24):
            for c in range(32):
                oracle[r, c] = min(a[r, c], b[r, c])
        assert mixed.data.tobytes() == oracle.tobytes()
    real = RGBImage(rng.integers(0, 256, size=(24, 32, 3), dtype=np.uint8))
    overlay = np.zeros((24, 32, 4), dtype=np.uint8)
    overlay[:, :, :3] = rng.integers(0, 256, size=(24, 32, 3))
    transparent = RGBAImage(overlay.copy())
    assert mix_rgb(real, transparent).data.tobytes() == real.data.tobytes()
    overlay[:, :, 3] = 255
    opaque = RGBAImage(overlay)
    assert mix_rgb(real, opaque).data.tobytes() == overlay[:, :, :3].tobytes()
    verdict(2, "depth min-fusion matches oracle on 100 pairs; alpha 0/255 bit-exact")


@timed(10.0)
def test_criterion_03_frechet_oracle():
    def oracle(a, b):
        @functools.lru_cache(maxsize=None)
        def c(i, j):
            d = math.hypot(a[i][0] - b[j][0], a[i][1] - b[j][1])
            if i == 0 and j == 0:
                return d
            if i == 0:
                return max(c(0, j - 1), d)
            if j == 0:
                return max(c(i - 1, 0), d)
            return max(min(c(i - 1, j), c(i - 1, j - 1), c(i, j - 1)), d)
        return c(len(a) - 1, len(b) - 1)

    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(500):
        a = rng.normal(size=(rng.integers(1, 13), 2)) * 4
        b = rng.normal(size=(rng.integers(1, 13), 2)) * 4
        got = discrete_frechet(a, b)
        want = oracle(tuple(map(tuple, a)), tuple(map(tuple, b)))
        worst = max(worst, abs(got - want))
    assert worst < 1e-12
    verdict(3, f"discrete Frechet matches DP oracle on 500 pairs, worst dev {worst:.1e}")


@timed(30.0)
def test_criterion_04_dbscan_oracle():
    def oracle(points, eps, min_pts):
        pts = np.asarray(points)
        n = len(pts)
        eps2 = eps * eps
        neigh = []
        for i in range(n):
            d = pts - pts[i]
            neigh.append(np.nonzero(d[:, 0]**2 + d[:, 1]**2 + d[:, 2]**2 <= eps2)[0])
        core = np.array([len(nb) >= min_pts for nb in neigh])
        labels = np.full(n, -1)
        cluster = 0
        for i in range(n):
            if not core[i] or labels[i] != -1:
                continue
            labels[i] = cluster
            stack = [i]
            while stack:
                p = stack.pop()
                if not core[p]:
                    continue
                for q in neigh[p]:
                    if labels[q] == -1:
                        labels[q] = cluster
                        stack.append(int(q))
            cluster += 1
        return labels

    def partition(labels):
        clusters = {}
        for idx, lab in enumerate(labels):
            if lab >= 0:
                clusters.setdefault(int(lab), set()).add(idx)
        return frozenset(frozenset(v) for v in clusters.values())

    rng = np.random.default_rng(103)
    for _ in range(200):
        n = int(rng.integers(1, 51))
        pts = rng.uniform(-1, 1, size=(n, 3))
        eps = float(rng.uniform(0.05, 0.7))
        min_pts = int(rng.integers(1, 8))
        got = _kernels.dbscan_labels(pts, eps, min_pts)
        want = oracle(pts, eps, min_pts)
        assert partition(got) == partition(want)
    verdict(4, "DBSCAN partitions match brute-force reachability on 200 instances")


@timed(60.0)
def test_criterion_05_actuation_gap_reproduction():
    gap = gap_preset("paper_rq2")
    twin = PlantParams()
    sc = build_scenario("N1")  # scenario irrelevant; runs are scripted open-loop

    def run_protocol(modality, cmd, duration):
        driver = ScriptedDriver(lambda t, s, c=cmd: c)
        return run_closed_loop(sc, modality, driver, gap=gap, seed=0,
                               max_duration=duration, twin_params=twin,
                               check_failures=False)

    # steering: radius from circle fit of the steady-state trajectory
    radii = {}
    for modality in (Modality.SIL, Modality.VIL, Modality.RW):
        log = run_protocol(modality, ControlCommand(throttle=0.365, steering=-1.0), 10.0)
        pts = [(r.x_real, r.y_real) for r in log.ticks if r.t >= 2.0]
        _, radius, _ = fit_circle(pts)
        radii[modality] = radius
    sil_err = abs(radii[Modality.SIL] - radii[Modality.RW])
    vil_err = abs(radii[Modality.VIL] - radii[Modality.RW])
    assert abs(sil_err - 0.81) <= 0.81 * 0.05, f"SiL radius error {sil_err:.4f}"
    assert vil_err < 1e-3, f"ViL radius error {vil_err:.2e}"

    # forward: 3 s travel distance at mid throttle
    dist = {}
    for modality in (Modality.SIL, Modality.VIL, Modality.RW):
        log = run_protocol(modality, ControlCommand(throttle=0.365, steering=0.0), 3.0)
        a, b = log.ticks[0], log.ticks[-1]
        dist[modality] = math.hypot(b.x_real - a.x_real, b.y_real - a.y_real)
    sil_fwd = dist[Modality.SIL] - dist[Modality.RW]
    vil_fwd = abs(dist[Modality.VIL] - dist[Modality.RW])
    assert abs(sil_fwd - 0.87) <= 0.87 * 0.05, f"SiL forward error {sil_fwd:.4f}"
    assert vil_fwd < 1e-3, f"ViL forward error {vil_fwd:.2e}"
    verdict(5, f"SiL left-radius error {sil_err:.3f} m (target 0.81 +/- 5%), ViL {vil_err:.1e}; "
               f"SiL forward error +{sil_fwd:.3f} m (target +0.87 +/- 5%), ViL {vil_fwd:.1e}")


@timed(60.0)
def test_criterion_06_zero_gap_null_result(tmp_path):
    zero = GapProfile()
    twin = PlantParams()
    for ads_name in ("modular", "e2e"):
        payloads = {}
        for modality in (Modality.SIL, Modality.RW, Modality.VIL, Modality.MR):
            sc = build_scenario("N1")
            driver = (ModularAds(sc, mode=PERCEPTION, plant_params=twin)
                      if ads_name == "modular" else E2EPolicy())
            log = run_closed_loop(sc, modality, driver, gap=zero, seed=0,
                                  max_duration=40.0, twin_params=twin,
                                  ads_label=ads_name)
            d = tmp_path / f"{ads_name}_{modality.value}"
            save_runlog(log, d)
            payloads[modality] = ((d / "ticks.csv").read_bytes(),
                                  (d / "outcome.json").read_bytes(),
                                  (d / "digests.csv").read_bytes())
        base = payloads[Modality.SIL]
        for modality, payload in payloads.items():
            assert payload == base, f"{ads_name}/{modality.value} differs at zero gap"
    verdict(6, "zero gap: tick tables, outcomes and frame digests byte-identical "
               "across SIL/RW/VIL/MR for both ADS on N1")


@timed(300.0)
def test_criterion_07_rq1_directional_trend():
    gap = gap_preset("sensor_noise")
    twin = PlantParams()
    sc = build_scenario("N2")
    frechet = {"SIL": [], "MR": []}
    agreement = {"SIL": 0, "MR": 0}
    for seed in range(5):
        logs = {}
        for modality in (Modality.RW, Modality.SIL, Modality.MR):
            driver = E2EPolicy()
            logs[modality.value] = run_closed_loop(sc, modality, driver, gap=gap,
                                                   seed=seed, max_duration=60.0,
                                                   twin_params=twin)
        rw = logs["RW"]
        for name in ("SIL", "MR"):
            frechet[name].append(discrete_frechet(
                trajectory_for_compare(logs[name]), trajectory_for_compare(rw)))
            agreement[name] += logs[name].outcome.type == rw.outcome.type
    mean_sil = float(np.mean(frechet["SIL"]))
    mean_mr = float(np.mean(frechet["MR"]))
    assert mean_mr < mean_sil, f"MR {mean_mr} !< SiL {mean_sil}"
    assert agreement["MR"] >= agreement["SIL"]
    verdict(7, f"N2 x 5 seeds, perception-dominant gap: mean Frechet-to-RW "
               f"MR {mean_mr:.4f} < SiL {mean_sil:.4f}; failure-type agreement "
               f"MR {agreement['MR']}/5 >= SiL {agreement['SIL']}/5")


@timed(300.0)
def test_criterion_08_ablation_isolation():
    gap = gap_preset("perception_crash")
    twin = PlantParams()
    sc = build_scenario("N2")
    failures = {}
    for mode in (PERCEPTION, GROUND_TRUTH):
        for modality in (Modality.SIL, Modality.RW):
            count = 0
            for seed in range(5):
                driver = ModularAds(sc, mode=mode, plant_params=twin)
                log = run_closed_loop(sc, modality, driver, gap=gap, seed=seed,
                                      max_duration=60.0, twin_params=twin)
                count += 1 if log.outcome.failure else 0
            failures[(mode, modality.value)] = count
    assert failures[(PERCEPTION, "RW")] != failures[(PERCEPTION, "SIL")], \
        f"perception-mode failure counts equal: {failures}"
    assert failures[(GROUND_TRUTH, "RW")] == failures[(GROUND_TRUTH, "SIL")], \
        f"ground-truth mode does not equalize: {failures}"
    verdict(8, f"perception mode failures RW {failures[(PERCEPTION, 'RW')]} vs "
               f"SiL {failures[(PERCEPTION, 'SIL')]}; ground-truth mode both "
               f"{failures[(GROUND_TRUTH, 'RW')]}")


@timed(300.0)
def test_criterion_09_perception_gap_direction():
    gap = gap_preset("sensor_noise")
    base = build_scenario("N1")
    wins = 0
    cloud_mr, cloud_vil = [], []
    pairs = 0
    sample_index = 0
    from gaplab.experiments.rq3 import OBSTACLE_DISTANCES, OBSTACLE_LAYOUTS
    while pairs < 100:
        for distance in OBSTACLE_DISTANCES:
            for layout in OBSTACLE_LAYOUTS:
                if pairs >= 100:
                    break
                scenario, _ = obstacle_scene(base, distance, layout)
                frames = synchronized_frames(scenario, scenario.start, gap,
                                             seed=0, sample_index=sample_index)
                sample_index += 1
                ssim_mr = image_battery(frames["MR"][0], frames["RW"][0]).ssim
                ssim_vil = image_battery(frames["VIL"][0], frames["RW"][0]).ssim
                wins += ssim_mr > ssim_vil
                st_mr = cloud_stats(
                    depth_to_cloud(frames["MR"][1], TOF_INTRINSICS, TOF_MIN_RANGE),
                    depth_to_cloud(frames["RW"][1], TOF_INTRINSICS, TOF_MIN_RANGE))
                st_vil = cloud_stats(
                    depth_to_cloud(frames["VIL"][1], TOF_INTRINSICS, TOF_MIN_RANGE),
                    depth_to_cloud(frames["RW"][1], TOF_INTRINSICS, TOF_MIN_RANGE))
                cloud_mr.append(st_mr.mean)
                cloud_vil.append(st_vil.mean)
                pairs += 1
    assert wins >= 95, f"SSIM(MR,RW) > SSIM(ViL,RW) on only {wins}/100 pairs"
    mean_mr, mean_vil = float(np.mean(cloud_mr)), float(np.mean(cloud_vil))
    assert mean_mr < mean_vil
    verdict(9, f"noise-only gap over 100 pairs: SSIM(MR,RW) higher on {wins}/100; "
               f"cloud mean error MR {mean_mr:.4f} m < ViL {mean_vil:.4f} m")


@timed(5.0)
def test_criterion_10_metric_identity_fixed_points():
    rng = np.random.default_rng(104)
    img = RGBImage(rng.integers(0, 256, size=(48, 64, 3), dtype=np.uint8))
    rep = image_battery(img, img)
    assert rep.ssim == pytest.approx(1.0, abs=1e-12)
    assert rep.mse == 0.0
    assert rep.kl_divergence == pytest.approx(0.0, abs=1e-12)
    assert rep.wasserstein == pytest.approx(0.0, abs=1e-12)
    assert iou((2, 3, 10, 12), (2, 3, 10, 12)) == 1.0
    pts = rng.normal(size=(40, 3))
    cloud = PointCloud(points=pts, frame="sensor", pixel_indices=np.arange(40))
    st = cloud_stats(cloud, cloud)
    assert (st.mean, st.max, st.std) == (0.0, 0.0, 0.0)
    verdict(10, "image battery, IoU and cloud stats all hit their identity fixed points")


@timed(5.0)
def test_criterion_11_statistics_oracles():
    u, p = mann_whitney_u([1, 2, 3], [4, 5, 6])
    # full enumeration oracle over C(6,3)=20 arrangements
    pooled = [1, 2, 3, 4, 5, 6]
    count_le = count_ge = total = 0
    for combo in itertools.combinations(range(6), 3):
        xs = [pooled[i] for i in combo]
        ys = [pooled[i] for i in range(6) if i not in combo]
        u_perm = sum(1 for a in xs for b in ys if a > b) + \
            0.5 * sum(1 for a in xs for b in ys if a == b)
        count_le += u_perm <= u
        count_ge += u_perm >= u
        total += 1
    p_oracle = min(1.0, 2.0 * min(count_le / total, count_ge / total))
    assert p == pytest.approx(p_oracle, abs=1e-12)
    assert p == pytest.approx(0.1, abs=1e-12)

    rng = np.random.default_rng(105)
    for _ in range(100):
        x = rng.normal(size=rng.integers(2, 15))
        y = rng.normal(loc=0.3, size=rng.integers(2, 15))
        d = cohens_d(x, y)
        assert cohens_d(y, x) == pytest.approx(-d, abs=1e-12)
        a, b = rng.uniform(0.1, 4.0), rng.uniform(-3, 3)
        assert cohens_d(a * x + b, a * y + b) == pytest.approx(d, abs=1e-9)
    verdict(11, "Mann-Whitney exact p = 0.1 matches enumeration; Cohen's d "
                "antisymmetry and affine invariance on 100 pairs")


@timed(15.0)
def test_criterion_12_udp_protocol():
    rng = np.random.default_rng(106)
    for _ in range(10_000):
        pose = Pose(x=rng.uniform(-20, 20), y=rng.uniform(-20, 20),
                    z=rng.uniform(-1, 1), yaw=rng.uniform(-math.pi, math.pi),
                    timestamp=float(np.float32(rng.uniform(0, 1000))))
        oid = int(rng.integers(0, 2**32 - 1))
        got_id, got = decode_tracking(encode_tracking(pose, oid))
        assert got_id == oid
        assert (got.x, got.y, got.z) == (pose.x, pose.y, pose.z)
        assert abs(got.yaw - pose.yaw) < 1e-12

    poses = [Pose(x=float(k), y=-float(k), yaw=0.001 * k) for k in range(1000)]
    decoded, dropped = udp_demo_bridge(poses, rate=100.0)
    assert dropped == 0
    assert len(decoded) >= 999
    verdict(12, f"encode/decode exact on 10^4 poses; 10 s loopback soak at 100 Hz "
                f"decoded {len(decoded)}/1000 with 0 protocol errors")


@timed(300.0)
def test_criterion_13_campaign_determinism(tmp_path):
    campaigns = [
        Campaign(id="rq2_forward", modalities=(Modality.SIL, Modality.VIL),
                 repetitions=2, seeds=(0, 1), gap=gap_preset("paper_rq2"),
                 gap_name="paper_rq2"),
        Campaign(id="rq2_steer", modalities=(Modality.SIL, Modality.VIL),
                 repetitions=1, seeds=(0,), gap=gap_preset("paper_rq2"),
                 gap_name="paper_rq2"),
    ]
    from gaplab.experiments import run_campaign, run_rq1

    digests = []
    for attempt in range(2):
        out = tmp_path / f"attempt{attempt}"
        for campaign in campaigns:
            run_campaign(campaign, str(out))
        rq1 = Campaign(id="rq1", scenario="N1",
                       modalities=(Modality.SIL, Modality.MR),
                       repetitions=4, seeds=(0, 1, 2, 3),
                       gap=gap_preset("sensor_noise"), gap_name="sensor_noise",
                       ads="modular", max_duration=45.0)
        run_rq1(rq1, str(out))
        csvs = sorted(p for p in out.rglob("*.csv"))
        digests.append({p.relative_to(out).as_posix(): p.read_bytes() for p in csvs})
    assert digests[0].keys() == digests[1].keys()
    for name in digests[0]:
        assert digests[0][name] == digests[1][name], f"{name} differs between executions"
    verdict(13, f"two executions of 3 campaigns produced byte-identical CSV reports "
                f"({len(digests[0])} files)")
