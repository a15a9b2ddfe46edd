"""Campaign files: validated descriptions of scripted experiment batteries.

Campaigns use the same JSON structured-text schema as scenarios. Every
campaign validates fully before the first run; configuration errors
surface as CampaignError (CLI exit code 2).
"""

import json
from dataclasses import dataclass, field

from gaplab.mixing import Modality
from gaplab.plant import ActuationGap, GapProfile, PerceptionGap
from gaplab.presets import GAP_PRESETS
from gaplab.world import PRESET_NAMES

CAMPAIGN_IDS = ("rq1", "rq2_forward", "rq2_steer", "rq2_brake", "rq2_pid",
                "rq2_waypoint", "rq3_obstacle", "rq3_lane", "ablation")
ADS_CHOICES = ("modular", "modular_gt", "e2e")


class CampaignError(ValueError):
    pass


@dataclass(frozen=True)
class Campaign:
    id: str
    scenario: str = "N1"
    modalities: tuple = (Modality.SIL, Modality.VIL, Modality.MR)
    repetitions: int = 5
    seeds: tuple = (0, 1, 2, 3, 4, 5, 6, 7)
    gap: GapProfile = field(default_factory=GapProfile)
    gap_name: str = "zero"
    ads: str = "modular"
    max_duration: float = 60.0
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.id not in CAMPAIGN_IDS:
            raise CampaignError(f"unknown campaign id {self.id!r}")
        if self.id in ("rq1", "ablation") and self.scenario not in PRESET_NAMES:
            raise CampaignError(f"unknown scenario {self.scenario!r}")
        if self.repetitions < 1:
            raise CampaignError("repetitions must be >= 1")
        if not self.modalities:
            raise CampaignError("campaign needs at least one modality")
        if self.ads not in ADS_CHOICES:
            raise CampaignError(f"unknown ads {self.ads!r}")
        if not self.seeds:
            raise CampaignError("campaign needs a seed list")
        if self.id == "rq1" and len(self.seeds) < 4:
            raise CampaignError("rq1 needs at least four seeds for the reference runs")


def _parse_gap(value):
    if value is None:
        return GapProfile(), "zero"
    if isinstance(value, str):
        if value not in GAP_PRESETS:
            raise CampaignError(f"unknown gap preset {value!r}")
        return GAP_PRESETS[value], value
    if isinstance(value, dict):
        try:
            gap = GapProfile(
                actuation=ActuationGap(**value.get("actuation", {})),
                perception=PerceptionGap(**value.get("perception", {})),
            )
        except TypeError as exc:
            raise CampaignError(f"bad inline gap profile: {exc}")
        return gap, "inline"
    raise CampaignError(f"gap must be a preset name or a mapping, got {type(value)}")


def campaign_from_dict(data):
    try:
        modalities = tuple(Modality(m) for m in data.get("modalities", ["SIL", "VIL", "MR"]))
    except ValueError as exc:
        raise CampaignError(str(exc))
    gap, gap_name = _parse_gap(data.get("gap"))
    try:
        return Campaign(
            id=data["id"],
            scenario=data.get("scenario", "N1"),
            modalities=modalities,
            repetitions=int(data.get("repetitions", 5)),
            seeds=tuple(int(s) for s in data.get("seeds", range(8))),
            gap=gap,
            gap_name=gap_name,
            ads=data.get("ads", "modular"),
            max_duration=float(data.get("max_duration", 60.0)),
            options=dict(data.get("options", {})),
        )
    except KeyError as exc:
        raise CampaignError(f"campaign file missing key: {exc}")


def load_campaign(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CampaignError(f"cannot read campaign file {path}: {exc}")
    return campaign_from_dict(data)
