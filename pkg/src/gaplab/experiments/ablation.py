"""Perception ablation: modular ADS with and without ground-truth inputs.

Four cells: {perception, ground_truth} x {SIL, RW}, matched seeds. When
ground-truth inputs equalize failure counts that differ with live
perception, the perception stage is isolated as the failure source.
"""

import os

from gaplab.ads import GROUND_TRUTH, ModularAds, PERCEPTION
from gaplab.experiments.report import mean_std, write_csv, write_summary
from gaplab.mixing import Modality
from gaplab.plant import PlantParams
from gaplab.runtime import run_closed_loop, save_runlog
from gaplab.world import build_scenario

CELLS = ((PERCEPTION, Modality.SIL), (PERCEPTION, Modality.RW),
         (GROUND_TRUTH, Modality.SIL), (GROUND_TRUTH, Modality.RW))


def run_ablation(campaign, out_dir):
    scenario = build_scenario(campaign.scenario)
    twin = PlantParams()
    rows = []
    failures = {}
    for mode, modality in CELLS:
        count = 0
        for seed in campaign.seeds[:campaign.repetitions]:
            driver = ModularAds(scenario, mode=mode, plant_params=twin)
            log = run_closed_loop(scenario, modality, driver, gap=campaign.gap,
                                  seed=seed, max_duration=campaign.max_duration,
                                  twin_params=twin, ads_label=f"modular_{mode}")
            if out_dir:
                save_runlog(log, os.path.join(out_dir, "runs",
                                              f"{mode}_{modality.value}_{seed}"))
            failed = 1 if log.outcome.failure else 0
            count += failed
            rows.append([mode, modality.value, seed, log.outcome.type,
                         log.outcome.completion_pct, failed])
        failures[(mode, modality.value)] = count

    header = ["mode", "modality", "seed", "outcome", "completion_pct", "failure"]
    write_csv(os.path.join(out_dir, "ablation_runs.csv"), header, rows)

    perception_differs = failures[(PERCEPTION, "SIL")] != failures[(PERCEPTION, "RW")]
    gt_equal = failures[(GROUND_TRUTH, "SIL")] == failures[(GROUND_TRUTH, "RW")]
    lines = [
        f"scenario {campaign.scenario}, gap {campaign.gap_name}, "
        f"{campaign.repetitions} runs per cell",
        f"perception mode failures: SIL {failures[(PERCEPTION, 'SIL')]}, "
        f"RW {failures[(PERCEPTION, 'RW')]}",
        f"ground-truth mode failures: SIL {failures[(GROUND_TRUTH, 'SIL')]}, "
        f"RW {failures[(GROUND_TRUTH, 'RW')]}",
        f"perception-mode counts differ: {perception_differs}",
        f"ground-truth mode equalizes: {gt_equal}",
        f"perception isolated as failure source: {perception_differs and gt_equal}",
    ]
    write_summary(os.path.join(out_dir, "ablation_summary.txt"),
                  "Perception ablation", lines)
    return rows, lines, failures
