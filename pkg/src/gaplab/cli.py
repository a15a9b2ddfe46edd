"""Command line interface.

Subcommands:
    run       execute a campaign file (JSON)
    replay    inspect a saved run directory, optionally re-verify it
    metrics   compare two run directories or two images
    udp-demo  loopback soak of the TRK1 tracking broadcast

Exit codes: 0 success, 1 run failures present (reports still written),
2 configuration error.
"""

import argparse
import json
import math
import os
import sys

from gaplab.experiments import CampaignError, load_campaign, run_campaign
from gaplab.presets import GAP_PRESETS


def cmd_run(args):
    try:
        campaign = load_campaign(args.campaign)
        if args.seed is not None:
            from dataclasses import replace
            campaign = replace(campaign, seeds=tuple(range(args.seed, args.seed + len(campaign.seeds))))
        if args.gap_preset is not None:
            from dataclasses import replace
            if args.gap_preset not in GAP_PRESETS:
                raise CampaignError(f"unknown gap preset {args.gap_preset!r}")
            campaign = replace(campaign, gap=GAP_PRESETS[args.gap_preset],
                               gap_name=args.gap_preset)
        if args.modality:
            from dataclasses import replace
            from gaplab.mixing import Modality
            campaign = replace(campaign, modalities=tuple(Modality(m) for m in args.modality))
    except (CampaignError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    os.makedirs(args.out, exist_ok=True)
    clean = run_campaign(campaign, args.out)
    print(f"campaign {campaign.id} finished; reports in {args.out}")
    return 0 if clean else 1


def cmd_replay(args):
    from gaplab.runtime import load_runlog

    log = load_runlog(args.rundir)
    print(f"scenario {log.header['scenario']} modality {log.header['modality']} "
          f"ads {log.header['ads']} seed {log.header['seed']}")
    print(f"outcome {log.outcome.type} ({log.outcome.detail}) at t={log.outcome.t:.2f}s "
          f"completion {log.outcome.completion_pct:.1f}%")
    print(f"{len(log.ticks)} ticks, {len(log.digests)} sensor frames")
    if args.svg:
        from gaplab.experiments import trajectory_svg
        from gaplab.world import build_scenario

        scenario = build_scenario(log.header["scenario"])
        traj = [(r.x_real, r.y_real) for r in log.ticks]
        failures = [(log.ticks[-1].x_real, log.ticks[-1].y_real)] if log.outcome.failure else []
        trajectory_svg(args.svg, scenario, [(log.header["modality"], traj)], failures)
        print(f"wrote {args.svg}")
    if args.verify:
        from gaplab.plant import ControlCommand, Plant, PlantParams
        from gaplab.world import build_scenario

        params = PlantParams(**log.header["active_params"])
        scenario = build_scenario(log.header["scenario"])
        plant = Plant(params, scenario.start.with_timestamp(0.0), 1.0 / log.header["rates"]["sim_tick"])
        max_err = 0.0
        for r in log.ticks:
            plant.step(ControlCommand(throttle=r.throttle, steering=r.steering, brake=r.brake))
            max_err = max(max_err, math.hypot(plant.pose.x - r.x_real, plant.pose.y - r.y_real))
        print(f"replay max position error: {max_err:.3e} m")
        return 0 if max_err < 1e-9 else 1
    return 0


def cmd_metrics(args):
    a, b = args.inputs
    if os.path.isdir(a) and os.path.isdir(b):
        from gaplab.metrics import evaluate_run
        from gaplab.runtime import load_runlog

        log, ref = load_runlog(a), load_runlog(b)
        m = evaluate_run(log, ref, None)
        print(json.dumps({
            "frechet_to_reference_m": m.frechet_to_reference,
            "completion_pct": m.completion_pct,
            "completion_delta_pct": m.completion_delta_vs_reference,
            "crashes": m.crashes,
            "out_of_road": m.out_of_road,
            "failure": m.failure,
        }, indent=2, sort_keys=True))
        return 0
    from gaplab.metrics import image_battery
    from gaplab.sensing import read_ppm

    rep = image_battery(read_ppm(a), read_ppm(b))
    print(json.dumps(rep.as_dict(), indent=2, sort_keys=True))
    return 0


def cmd_udp_demo(args):
    from gaplab.geometry import Pose
    from gaplab.runtime import udp_demo_bridge

    poses = [Pose(x=math.sin(i / 50.0), y=math.cos(i / 50.0), yaw=i * 0.01)
             for i in range(args.count)]
    decoded, dropped = udp_demo_bridge(poses, rate=args.rate)
    print(f"sent {args.count} datagrams at {args.rate:.0f} Hz; decoded {len(decoded)}, "
          f"malformed dropped {dropped}")
    return 0 if len(decoded) >= args.count - 1 and dropped == 0 else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="gaplab",
                                     description="reality-gap evaluation harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a campaign file")
    p_run.add_argument("campaign", help="campaign JSON path")
    p_run.add_argument("--out", default="out", help="output directory")
    p_run.add_argument("--seed", type=int, default=None,
                       help="rebase the campaign seed list at this seed")
    p_run.add_argument("--modality", action="append", default=None,
                       help="restrict modalities (repeatable)")
    p_run.add_argument("--gap-preset", default=None,
                       help=f"override gap profile ({', '.join(sorted(GAP_PRESETS))})")
    p_run.add_argument("--frames", action="store_true",
                       help="persist full sensor frames for each run")
    p_run.set_defaults(func=cmd_run)

    p_replay = sub.add_parser("replay", help="inspect a saved run")
    p_replay.add_argument("rundir")
    p_replay.add_argument("--svg", default=None, help="write a trajectory SVG")
    p_replay.add_argument("--verify", action="store_true",
                          help="re-integrate the command log and compare poses")
    p_replay.set_defaults(func=cmd_replay)

    p_metrics = sub.add_parser("metrics", help="compare two runs or two images")
    p_metrics.add_argument("inputs", nargs=2,
                           help="two run directories or two PPM images")
    p_metrics.set_defaults(func=cmd_metrics)

    p_udp = sub.add_parser("udp-demo", help="TRK1 loopback soak")
    p_udp.add_argument("--count", type=int, default=1000)
    p_udp.add_argument("--rate", type=float, default=100.0)
    p_udp.set_defaults(func=cmd_udp_demo)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
