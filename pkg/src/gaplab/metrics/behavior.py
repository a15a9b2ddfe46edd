"""Behavioral scoring of a run against its reference counterpart."""

from dataclasses import dataclass

from gaplab.geometry import discrete_frechet
from gaplab.runtime.runlog import CRASH, OUT_OF_ROAD

# trajectories are logged at the integration rate; comparisons happen at
# the control rate to match the command cadence
COMPARE_STRIDE = 5


@dataclass(frozen=True)
class BehaviorMetrics:
    frechet_to_reference: float
    completion_pct: float
    completion_delta_vs_reference: float
    crashes: int
    out_of_road: int

    @property
    def failure(self):
        return (self.crashes + self.out_of_road) > 0


def trajectory_for_compare(log, stride=COMPARE_STRIDE):
    pts = [(r.x_real, r.y_real) for r in log.ticks[::stride]]
    if not pts:
        pts = [(log.ticks[-1].x_real, log.ticks[-1].y_real)] if log.ticks else [(0.0, 0.0)]
    return pts


def evaluate_run(log, reference, scenario):
    """BehaviorMetrics of log, with trajectory and completion vs reference."""
    if log.header.get("scenario") != reference.header.get("scenario"):
        raise ValueError("run and reference come from different scenarios")
    if scenario is not None and log.header.get("scenario") != scenario.name:
        raise ValueError("logs do not match the given scenario")
    frechet = discrete_frechet(trajectory_for_compare(log),
                               trajectory_for_compare(reference))
    crashes = 1 if log.outcome.type == CRASH else 0
    oor = 1 if log.outcome.type == OUT_OF_ROAD else 0
    return BehaviorMetrics(
        frechet_to_reference=float(frechet),
        completion_pct=log.outcome.completion_pct,
        completion_delta_vs_reference=log.outcome.completion_pct - reference.outcome.completion_pct,
        crashes=crashes,
        out_of_road=oor,
    )
