import json
import math
import subprocess
import sys

import numpy as np
import pytest

from gaplab.experiments import (
    Campaign,
    CampaignError,
    campaign_from_dict,
    load_campaign,
    open_scenario,
    run_ablation,
    run_rq2,
    synchronized_frames,
)
from gaplab.experiments.rq3 import obstacle_scene, shift_columns
from gaplab.mixing import Modality
from gaplab.plant import GapProfile
from gaplab.presets import GAP_PRESETS, gap_preset
from gaplab.sensing import DepthImage, RGBAImage
from gaplab.world import build_scenario


class TestCampaignValidation:
    def test_load_valid(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({
            "id": "rq1", "scenario": "N2", "modalities": ["SIL", "MR"],
            "repetitions": 4, "seeds": [0, 1, 2, 3], "gap": "sensor_noise",
            "ads": "modular",
        }))
        c = load_campaign(path)
        assert c.id == "rq1"
        assert c.gap == GAP_PRESETS["sensor_noise"]
        assert c.modalities == (Modality.SIL, Modality.MR)

    def test_unknown_id(self):
        with pytest.raises(CampaignError):
            campaign_from_dict({"id": "rq9"})

    def test_unknown_preset(self):
        with pytest.raises(CampaignError):
            campaign_from_dict({"id": "rq1", "gap": "nope", "seeds": [0, 1, 2, 3]})

    def test_unknown_modality(self):
        with pytest.raises(CampaignError):
            campaign_from_dict({"id": "rq1", "modalities": ["XX"], "seeds": [0, 1, 2, 3]})

    def test_empty_modalities(self):
        with pytest.raises(CampaignError):
            campaign_from_dict({"id": "rq1", "modalities": [], "seeds": [0, 1, 2, 3]})

    def test_inline_gap(self):
        c = campaign_from_dict({
            "id": "rq2_forward",
            "gap": {"actuation": {"throttle_gain_scale": 0.9}},
        })
        assert c.gap.actuation.throttle_gain_scale == 0.9
        assert c.gap_name == "inline"

    def test_rq1_needs_four_seeds(self):
        with pytest.raises(CampaignError):
            campaign_from_dict({"id": "rq1", "seeds": [0, 1]})

    def test_bad_file_is_config_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(CampaignError):
            load_campaign(path)


class TestPresets:
    def test_zero_preset_is_identity(self):
        assert gap_preset("zero").is_zero

    def test_unknown_preset(self):
        with pytest.raises(LookupError):
            gap_preset("wat")

    def test_paper_rq2_calibration_targets(self):
        # closed-form radius deltas from the calibrated steer scales
        from gaplab.plant import PlantParams, make_pseudo_real, turning_radius
        twin = PlantParams()
        real = make_pseudo_real(twin, gap_preset("paper_rq2"))
        assert turning_radius(real, -1.0) - turning_radius(twin, -1.0) == \
            pytest.approx(0.81, abs=1e-9)
        assert turning_radius(real, 1.0) - turning_radius(twin, 1.0) == \
            pytest.approx(0.16, abs=1e-9)


class TestRq2Protocols:
    def test_zero_gap_null(self, tmp_path):
        c = Campaign(id="rq2_forward", modalities=(Modality.SIL, Modality.VIL),
                     repetitions=1, seeds=(0,), gap=GapProfile(), gap_name="zero")
        rows, _ = run_rq2(c, str(tmp_path))
        for row in rows:
            assert abs(row[8]) < 1e-6  # distance error vs RW
            assert abs(row[9]) < 1e-6  # speed error vs RW

    def test_forward_command_count(self, tmp_path):
        from gaplab.runtime import run_closed_loop
        from gaplab.runtime.drivers import ScriptedDriver
        from gaplab.plant import ControlCommand, PlantParams
        sc = open_scenario()
        driver = ScriptedDriver(lambda t, s: ControlCommand(0.365, 0.0))
        log = run_closed_loop(sc, Modality.SIL, driver, max_duration=3.0,
                              check_failures=False, twin_params=PlantParams())
        control_rows = [r for r in log.ticks if r.tick % 5 == 0]
        assert len(control_rows) == 60  # 3 s at 20 Hz

    def test_open_scenario_valid(self):
        sc = open_scenario()
        inside, _, _ = sc.track.lane_query(sc.start.x, sc.start.y)
        assert inside


class TestRq3Helpers:
    def test_shift_columns_rgba(self):
        buf = np.zeros((4, 6, 4), dtype=np.uint8)
        buf[:, 2, :] = (9, 9, 9, 255)
        shifted = shift_columns(RGBAImage(buf), 2)
        assert (shifted.data[:, 4, 3] == 255).all()
        assert (shifted.data[:, :2, 3] == 0).all()

    def test_shift_columns_depth_fills_sentinel(self):
        d = DepthImage(np.full((4, 6), 2.0, dtype=np.float32))
        shifted = shift_columns(d, -2)
        assert (shifted.data[:, 4:] == d.sentinel).all()
        assert (shifted.data[:, :4] == np.float32(2.0)).all()

    def test_obstacle_scene_layouts(self):
        base = build_scenario("N1")
        single, placements = obstacle_scene(base, 0.8, "single")
        assert len(single.obstacles) == 1 and len(placements) == 1
        dual, placements = obstacle_scene(base, 0.8, "dual")
        assert len(dual.obstacles) == 2
        # placements are symmetric about the heading axis
        from gaplab.geometry import world_to_frame
        rel = [world_to_frame(base.start, x, y) for x, y in placements]
        assert rel[0][1] == pytest.approx(-rel[1][1], abs=1e-9)

    def test_synchronized_frames_zero_gap_identity(self):
        base = build_scenario("N1")
        scenario, _ = obstacle_scene(base, 1.2, "single")
        frames = synchronized_frames(scenario, scenario.start, GapProfile(), 0, 0)
        assert frames["MR"][0].data.tobytes() == frames["VIL"][0].data.tobytes()
        assert frames["MR"][1].data.tobytes() == frames["VIL"][1].data.tobytes()
        assert frames["RW"][0].data.tobytes() == frames["VIL"][0].data.tobytes()


class TestAblationCampaign:
    def test_isolation_summary(self, tmp_path):
        c = Campaign(id="ablation", scenario="N2",
                     modalities=(Modality.SIL, Modality.RW), repetitions=2,
                     seeds=(1, 3), gap=gap_preset("perception_crash"),
                     gap_name="perception_crash")
        rows, lines, failures = run_ablation(c, str(tmp_path))
        assert failures[("ground_truth", "SIL")] == failures[("ground_truth", "RW")]
        assert (tmp_path / "ablation_summary.txt").exists()


class TestCli:
    def run_cli(self, *args):
        return subprocess.run([sys.executable, "-m", "gaplab.cli", *args],
                              capture_output=True, text=True)

    def test_udp_demo(self):
        out = self.run_cli("udp-demo", "--count", "50", "--rate", "400")
        assert out.returncode == 0
        assert "decoded" in out.stdout

    def test_config_error_exit_code(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"id": "bogus"}))
        out = self.run_cli("run", str(path), "--out", str(tmp_path / "out"))
        assert out.returncode == 2

    def test_run_and_replay(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({
            "id": "rq1", "scenario": "N1", "modalities": ["SIL"],
            "repetitions": 4, "seeds": [0, 1, 2, 3], "gap": "zero",
            "ads": "modular_gt", "max_duration": 40.0,
        }))
        out_dir = tmp_path / "out"
        out = self.run_cli("run", str(path), "--out", str(out_dir))
        assert out.returncode == 0, out.stderr
        assert (out_dir / "rq1_runs.csv").exists()
        assert (out_dir / "rq1_summary.txt").exists()
        run_dir = out_dir / "runs" / "SIL_0"
        replay = self.run_cli("replay", str(run_dir), "--verify",
                              "--svg", str(tmp_path / "t.svg"))
        assert replay.returncode == 0, replay.stdout + replay.stderr
        assert "replay max position error" in replay.stdout
        assert (tmp_path / "t.svg").exists()

    def test_metrics_pair_of_runs(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({
            "id": "rq1", "scenario": "N1", "modalities": ["SIL"],
            "repetitions": 4, "seeds": [0, 1, 2, 3], "gap": "zero",
            "ads": "modular_gt", "max_duration": 30.0,
        }))
        out_dir = tmp_path / "out"
        assert self.run_cli("run", str(path), "--out", str(out_dir)).returncode == 0
        out = self.run_cli("metrics", str(out_dir / "runs" / "SIL_0"),
                           str(out_dir / "runs" / "RW_0"))
        assert out.returncode == 0
        payload = json.loads(out.stdout)
        assert payload["frechet_to_reference_m"] == 0.0
