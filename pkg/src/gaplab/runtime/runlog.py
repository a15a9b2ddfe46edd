"""Run logs: the complete per-tick record a closed-loop run leaves behind.

On disk a run is a directory:
    header.json   scenario/modality/seed and every frozen parameter
    ticks.csv     tick,t,throttle,steering,brake,x_twin,y_twin,yaw_twin,
                  x_real,y_real,yaw_real,event
    digests.csv   frame,tick,rgb_sha256,depth_sha256
    outcome.json  terminal outcome
    frames/       optional full sensor frames (PPM / DPTH)

Floats serialize with repr (shortest round-trip), so identical runs
produce byte-identical files.
"""

import csv
import hashlib
import json
import os
from dataclasses import dataclass, field

COMPLETED = "completed"
CRASH = "crash"
OUT_OF_ROAD = "out_of_road"
PLANNER_BLOCKED = "planner_blocked"
TIMEOUT = "timeout"

TERMINAL_TYPES = (COMPLETED, CRASH, OUT_OF_ROAD, PLANNER_BLOCKED, TIMEOUT)

TICK_COLUMNS = ("tick", "t", "throttle", "steering", "brake", "x_twin", "y_twin",
                "yaw_twin", "x_real", "y_real", "yaw_real", "event")


@dataclass(frozen=True)
class TickRecord:
    tick: int
    t: float
    throttle: float
    steering: float
    brake: float
    x_twin: float
    y_twin: float
    yaw_twin: float
    x_real: float
    y_real: float
    yaw_real: float
    event: str = ""


@dataclass(frozen=True)
class FrameDigest:
    frame: int
    tick: int
    rgb_sha256: str = ""
    depth_sha256: str = ""


@dataclass(frozen=True)
class Outcome:
    type: str
    detail: str = ""
    tick: int = 0
    t: float = 0.0
    arc_position: float = 0.0
    progress: float = 0.0
    completion_pct: float = 0.0

    def __post_init__(self):
        if self.type not in TERMINAL_TYPES:
            raise ValueError(f"unknown outcome type {self.type!r}")

    @property
    def failure(self):
        return self.type in (CRASH, OUT_OF_ROAD)


@dataclass
class RunLog:
    header: dict
    ticks: list = field(default_factory=list)
    digests: list = field(default_factory=list)
    outcome: Outcome | None = None

    def trajectory_xy(self, which="real"):
        prefix = "x_real" if which == "real" else "x_twin"
        if which == "real":
            return [(r.x_real, r.y_real) for r in self.ticks]
        return [(r.x_twin, r.y_twin) for r in self.ticks]

    def commands(self):
        return [(r.throttle, r.steering, r.brake) for r in self.ticks]


def digest_bytes(data):
    return hashlib.sha256(data).hexdigest()


def _fmt(value):
    return repr(float(value))


def save_runlog(log, directory):
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "header.json"), "w", encoding="utf-8") as fh:
        json.dump(log.header, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(directory, "ticks.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TICK_COLUMNS)
        for r in log.ticks:
            writer.writerow([r.tick, _fmt(r.t), _fmt(r.throttle), _fmt(r.steering),
                             _fmt(r.brake), _fmt(r.x_twin), _fmt(r.y_twin),
                             _fmt(r.yaw_twin), _fmt(r.x_real), _fmt(r.y_real),
                             _fmt(r.yaw_real), r.event])
    with open(os.path.join(directory, "digests.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("frame", "tick", "rgb_sha256", "depth_sha256"))
        for d in log.digests:
            writer.writerow((d.frame, d.tick, d.rgb_sha256, d.depth_sha256))
    with open(os.path.join(directory, "outcome.json"), "w", encoding="utf-8") as fh:
        json.dump({
            "type": log.outcome.type, "detail": log.outcome.detail,
            "tick": log.outcome.tick, "t": log.outcome.t,
            "arc_position": log.outcome.arc_position,
            "progress": log.outcome.progress,
            "completion_pct": log.outcome.completion_pct,
        }, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_runlog(directory):
    with open(os.path.join(directory, "header.json"), encoding="utf-8") as fh:
        header = json.load(fh)
    ticks = []
    with open(os.path.join(directory, "ticks.csv"), encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            ticks.append(TickRecord(
                tick=int(row["tick"]), t=float(row["t"]),
                throttle=float(row["throttle"]), steering=float(row["steering"]),
                brake=float(row["brake"]), x_twin=float(row["x_twin"]),
                y_twin=float(row["y_twin"]), yaw_twin=float(row["yaw_twin"]),
                x_real=float(row["x_real"]), y_real=float(row["y_real"]),
                yaw_real=float(row["yaw_real"]), event=row["event"]))
    digests = []
    with open(os.path.join(directory, "digests.csv"), encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            digests.append(FrameDigest(frame=int(row["frame"]), tick=int(row["tick"]),
                                       rgb_sha256=row["rgb_sha256"],
                                       depth_sha256=row["depth_sha256"]))
    with open(os.path.join(directory, "outcome.json"), encoding="utf-8") as fh:
        data = json.load(fh)
    outcome = Outcome(type=data["type"], detail=data["detail"], tick=data["tick"],
                      t=data["t"], arc_position=data["arc_position"],
                      progress=data["progress"], completion_pct=data["completion_pct"])
    return RunLog(header=header, ticks=ticks, digests=digests, outcome=outcome)
