"""Behavior-gap campaign: matched runs across modalities vs the RW reference.

Reference runs execute first: seeds are consumed in order until four
non-failed RW runs exist or the seed list is exhausted. Every other
modality then replays exactly the attempted seed list, and each run is
scored against the same-seed reference (trajectory Frechet distance,
completion delta, out-of-road / crash counts, failure rate).
"""

import os
from concurrent.futures import ProcessPoolExecutor

from gaplab.ads import E2EPolicy, GROUND_TRUTH, ModularAds, PERCEPTION
from gaplab.experiments.report import mean_std, trajectory_svg, write_csv, write_summary
from gaplab.metrics.behavior import evaluate_run
from gaplab.mixing import Modality
from gaplab.plant import PlantParams
from gaplab.runtime import run_closed_loop, save_runlog
from gaplab.world import build_scenario

REFERENCE_SUCCESSES = 4


def make_driver(ads, scenario, twin):
    if ads == "modular":
        return ModularAds(scenario, mode=PERCEPTION, plant_params=twin)
    if ads == "modular_gt":
        return ModularAds(scenario, mode=GROUND_TRUTH, plant_params=twin)
    if ads == "e2e":
        return E2EPolicy()
    raise ValueError(f"unknown ads {ads!r}")


def reference_seed_list(campaign, scenario, twin, out_dir=None):
    """RW runs in seed order until enough successes; returns (seeds, logs)."""
    attempted = []
    logs = {}
    successes = 0
    for seed in campaign.seeds:
        driver = make_driver(campaign.ads, scenario, twin)
        log = run_closed_loop(scenario, Modality.RW, driver, gap=campaign.gap,
                              seed=seed, max_duration=campaign.max_duration,
                              twin_params=twin, ads_label=campaign.ads)
        attempted.append(seed)
        logs[seed] = log
        if out_dir:
            save_runlog(log, os.path.join(out_dir, "runs", f"RW_{seed}"))
        if log.outcome.type == "completed":
            successes += 1
        if successes >= REFERENCE_SUCCESSES:
            break
    return attempted, logs


def _execute_matched_run(spec):
    """Worker-pool entry: one (modality, seed) run, rebuilt from names."""
    campaign, modality_value, seed = spec
    scenario = build_scenario(campaign.scenario)
    twin = PlantParams()
    driver = make_driver(campaign.ads, scenario, twin)
    log = run_closed_loop(scenario, Modality(modality_value), driver,
                          gap=campaign.gap, seed=seed,
                          max_duration=campaign.max_duration,
                          twin_params=twin, ads_label=campaign.ads)
    return (modality_value, seed), log


def run_rq1(campaign, out_dir):
    scenario = build_scenario(campaign.scenario)
    twin = PlantParams()
    seeds, reference = reference_seed_list(campaign, scenario, twin, out_dir)
    if not any(log.outcome.type == "completed" for log in reference.values()):
        raise RuntimeError("reference modality produced zero successful runs")

    rows = []
    all_logs = {}
    for seed in seeds:
        ref = reference[seed]
        all_logs[("RW", seed)] = ref
        rows.append(["RW", seed, ref.outcome.type, ref.outcome.completion_pct,
                     0.0, 0.0, 1 if ref.outcome.type == "crash" else 0,
                     1 if ref.outcome.type == "out_of_road" else 0])

    specs = [(campaign, modality.value, seed)
             for modality in campaign.modalities if modality != Modality.RW
             for seed in seeds]
    workers = int(campaign.options.get("workers", 1))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = dict(pool.map(_execute_matched_run, specs))
    else:
        results = dict(_execute_matched_run(spec) for spec in specs)

    # aggregate in fixed (modality, seed) order regardless of worker timing
    for campaign_, modality_value, seed in specs:
        log = results[(modality_value, seed)]
        if out_dir:
            save_runlog(log, os.path.join(out_dir, "runs", f"{modality_value}_{seed}"))
        metrics = evaluate_run(log, reference[seed], scenario)
        all_logs[(modality_value, seed)] = log
        rows.append([modality_value, seed, log.outcome.type,
                     metrics.completion_pct, metrics.frechet_to_reference,
                     metrics.completion_delta_vs_reference, metrics.crashes,
                     metrics.out_of_road])

    header = ["modality", "seed", "outcome", "completion_pct", "frechet_to_rw_m",
              "completion_delta_pct", "crash", "out_of_road"]
    write_csv(os.path.join(out_dir, "rq1_runs.csv"), header, rows)

    lines = [f"scenario {campaign.scenario}, ads {campaign.ads}, "
             f"gap {campaign.gap_name}, {len(seeds)} matched seeds"]
    modality_order = ["RW"] + [m.value for m in campaign.modalities if m != Modality.RW]
    for mod in modality_order:
        sub = [r for r in rows if r[0] == mod]
        fre_m, fre_s = mean_std([r[4] for r in sub])
        comp_m, _ = mean_std([r[5] for r in sub])
        crashes = sum(r[6] for r in sub)
        oor = sum(r[7] for r in sub)
        fr = (crashes + oor) / len(sub) if sub else float("nan")
        lines.append(f"{mod}: trajectory_delta {fre_m:.4g} +/- {fre_s:.4g} m, "
                     f"completion_delta {comp_m:.4g} pp, OOR {oor}, crash {crashes}, "
                     f"failure_rate {fr:.2f}")
    write_summary(os.path.join(out_dir, "rq1_summary.txt"),
                  f"RQ1 behavior gap ({campaign.scenario})", lines)

    for seed in seeds:
        named = []
        failures = []
        for mod in modality_order:
            log = all_logs.get((mod, seed))
            if log is None:
                continue
            named.append((f"{mod}/seed{seed}", [(r.x_real, r.y_real) for r in log.ticks]))
            if log.outcome.failure:
                last = log.ticks[-1]
                failures.append((last.x_real, last.y_real))
        trajectory_svg(os.path.join(out_dir, f"rq1_trajectories_seed{seed}.svg"),
                       scenario, named, failures)
    return rows, lines
