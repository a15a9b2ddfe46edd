from gaplab.experiments.ablation import run_ablation
from gaplab.experiments.campaign import Campaign, CampaignError, campaign_from_dict, load_campaign
from gaplab.experiments.report import trajectory_svg, write_csv, write_summary
from gaplab.experiments.rq1 import run_rq1
from gaplab.experiments.rq2 import open_scenario, run_rq2
from gaplab.experiments.rq3 import run_rq3_lane, run_rq3_obstacle, synchronized_frames


def run_campaign(campaign, out_dir):
    """Dispatch a validated campaign; returns True when no run failed."""
    if campaign.id.startswith("rq2"):
        run_rq2(campaign, out_dir)
        return True
    if campaign.id == "rq1":
        rows, _ = run_rq1(campaign, out_dir)
        return not any(r[6] or r[7] for r in rows)
    if campaign.id == "ablation":
        rows, _, _ = run_ablation(campaign, out_dir)
        return not any(r[5] for r in rows)
    if campaign.id == "rq3_obstacle":
        run_rq3_obstacle(campaign, out_dir)
        return True
    if campaign.id == "rq3_lane":
        run_rq3_lane(campaign, out_dir)
        return True
    raise CampaignError(f"unhandled campaign id {campaign.id!r}")


__all__ = [
    "Campaign", "CampaignError", "campaign_from_dict", "load_campaign",
    "run_campaign", "run_rq1", "run_rq2", "run_rq3_lane", "run_rq3_obstacle",
    "run_ablation", "open_scenario", "synchronized_frames", "trajectory_svg",
    "write_csv", "write_summary",
]
