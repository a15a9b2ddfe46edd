"""Rooms, tracks, obstacles and the N1/N2/G scenario presets.

Physical layout of the two preset rooms:
  * nominal: 6 x 6 m lab, closed loop in a ~4 x 4 m envelope with five
    right and two left curves, 10 cm margins and a dotted center line,
  * generalization: 8 x 7 m hall, 6 x 5 m stadium (two semi-circular
    arcs joined by straights), 3 cm margins, no center line, different
    floor color.

The published rooms' exact survey coordinates are not available, so the
control points below are this package's canonical stand-in layouts with
the same qualitative topology; reports flag them as such.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from gaplab.geometry import Pose, Spline, sample_spline

TRACK_SAMPLE_STEPS = 32


@dataclass(frozen=True)
class Room:
    name: str
    width: float
    depth: float
    floor_color: tuple
    wall_color: tuple
    floor_texture: str
    wall_height: float = 0.5
    wall_thickness: float = 0.05

    def wall_boxes(self):
        """Four perimeter walls as (cx, cy, cz, hx, hy, hz, yaw) tuples."""
        t, h = self.wall_thickness, self.wall_height
        w, d = self.width, self.depth
        return [
            (w / 2, -t / 2, h / 2, w / 2 + t, t / 2, h / 2, 0.0),
            (w / 2, d + t / 2, h / 2, w / 2 + t, t / 2, h / 2, 0.0),
            (-t / 2, d / 2, h / 2, t / 2, d / 2 + t, h / 2, 0.0),
            (w + t / 2, d / 2, h / 2, t / 2, d / 2 + t, h / 2, 0.0),
        ]


class Track:
    """Closed centerline spline with lane geometry and an arc-length table."""

    def __init__(self, center, lane_half_width, margin_width, has_center_dots):
        if not center.closed:
            raise ValueError("track centerline must be a closed spline")
        self.center = center
        self.lane_half_width = float(lane_half_width)
        self.margin_width = float(margin_width)
        self.has_center_dots = bool(has_center_dots)
        self._table = None

    def _build_table(self):
        pts = sample_spline(self.center, TRACK_SAMPLE_STEPS)
        seg = np.roll(pts, -1, axis=0) - pts
        seg_len = np.hypot(seg[:, 0], seg[:, 1])
        cum = np.concatenate([[0.0], np.cumsum(seg_len)])
        tangents = seg / seg_len[:, None]
        self._table = (pts, seg, seg_len, cum, tangents)

    @property
    def table(self):
        if self._table is None:
            self._build_table()
        return self._table

    @property
    def length(self):
        return float(self.table[3][-1])

    def point_at(self, s):
        """Centerline point and unit tangent at arc position s (wraps)."""
        pts, seg, seg_len, cum, tangents = self.table
        s = float(s) % self.length
        i = int(np.searchsorted(cum, s, side="right")) - 1
        i = min(max(i, 0), len(seg_len) - 1)
        t = (s - cum[i]) / seg_len[i]
        p = pts[i] + t * seg[i]
        return (float(p[0]), float(p[1])), (float(tangents[i, 0]), float(tangents[i, 1]))

    def lane_query(self, x, y):
        """(inside, signed lateral offset, arc position) for a world point.

        Lateral offset is positive to the left of the travel direction;
        inside means |offset| <= lane_half_width.
        """
        pts, seg, seg_len, cum, tangents = self.table
        dx = x - pts[:, 0]
        dy = y - pts[:, 1]
        t = np.clip((dx * seg[:, 0] + dy * seg[:, 1]) / (seg_len * seg_len), 0.0, 1.0)
        px = pts[:, 0] + t * seg[:, 0] - x
        py = pts[:, 1] + t * seg[:, 1] - y
        d2 = px * px + py * py
        i = int(np.argmin(d2))
        arc = float((cum[i] + t[i] * seg_len[i]) % self.length)
        lateral = float(tangents[i, 0] * (y - (pts[i, 1] + t[i] * seg[i, 1]))
                        - tangents[i, 1] * (x - (pts[i, 0] + t[i] * seg[i, 0])))
        return abs(lateral) <= self.lane_half_width, lateral, arc


def lane_query(pose, track):
    return track.lane_query(pose.x, pose.y)


@dataclass(frozen=True)
class Obstacle:
    id: str
    pose: Pose
    length: float
    width: float
    height: float
    color: tuple = (200, 40, 40)

    def __post_init__(self):
        if min(self.length, self.width, self.height) <= 0:
            raise ValueError("obstacle dimensions must be positive")


@dataclass(frozen=True)
class VehicleShape:
    length: float = 0.40
    width: float = 0.25
    height: float = 0.15


@dataclass
class Scenario:
    name: str
    room: Room
    track: Track
    obstacles: list
    start: Pose
    direction: str  # CW or CCW, descriptive; driving always follows spline order
    vehicle: VehicleShape = field(default_factory=VehicleShape)

    def __post_init__(self):
        ids = [o.id for o in self.obstacles]
        if len(ids) != len(set(ids)):
            raise ValueError("obstacle ids must be unique")
        inside, _, _ = self.track.lane_query(self.start.x, self.start.y)
        if not inside:
            raise ValueError("start pose must lie inside the lane")

    def obstacle_by_id(self, obstacle_id):
        for o in self.obstacles:
            if o.id == obstacle_id:
                return o
        raise KeyError(obstacle_id)


def _rect_axes(yaw):
    c, s = math.cos(yaw), math.sin(yaw)
    return (c, s), (-s, c)


def _overlap_on_axis(axis, ca, ax_a, ay_a, ha, la, cb, ax_b, ay_b, hb, lb):
    # projection radius of each oriented rect on the axis
    ra = la * abs(axis[0] * ax_a[0] + axis[1] * ax_a[1]) + ha * abs(axis[0] * ay_a[0] + axis[1] * ay_a[1])
    rb = lb * abs(axis[0] * ax_b[0] + axis[1] * ax_b[1]) + hb * abs(axis[0] * ay_b[0] + axis[1] * ay_b[1])
    dist = abs(axis[0] * (cb[0] - ca[0]) + axis[1] * (cb[1] - ca[1]))
    return dist <= ra + rb


def boxes_overlap(center_a, yaw_a, half_len_a, half_wid_a,
                  center_b, yaw_b, half_len_b, half_wid_b):
    """Closed-set SAT overlap of two yaw-oriented rectangles (edge contact counts)."""
    ax_a, ay_a = _rect_axes(yaw_a)
    ax_b, ay_b = _rect_axes(yaw_b)
    for axis in (ax_a, ay_a, ax_b, ay_b):
        if not _overlap_on_axis(axis, center_a, ax_a, ay_a, half_wid_a, half_len_a,
                                center_b, ax_b, ay_b, half_wid_b, half_len_b):
            return False
    return True


def collision_query(vehicle_pose, vehicle, obstacles):
    """First obstacle whose footprint overlaps the vehicle footprint, else None."""
    for obs in obstacles:
        if boxes_overlap((vehicle_pose.x, vehicle_pose.y), vehicle_pose.yaw,
                         vehicle.length / 2, vehicle.width / 2,
                         (obs.pose.x, obs.pose.y), obs.pose.yaw,
                         obs.length / 2, obs.width / 2):
            return obs.id
    return None


# ---------------------------------------------------------------------------
# presets

ROOM_NOMINAL = Room(
    name="nominal", width=6.0, depth=6.0,
    floor_color=(126, 126, 126), wall_color=(70, 70, 76),
    floor_texture="nominal_gray",
)

ROOM_GENERALIZATION = Room(
    name="generalization", width=8.0, depth=7.0,
    floor_color=(96, 112, 138), wall_color=(84, 78, 70),
    floor_texture="generalization_blue",
)

# ~4 x 4 m clockwise loop: four ~80-95 degree right corners plus a
# shallow V-dip along the bottom edge contributing the fifth right and
# the two left curves; the tightest apexes sit near the vehicle's
# steering limit
NOMINAL_CONTROL_POINTS = (
    (1.10, 1.90), (1.10, 2.70),
    (1.22, 3.55), (1.78, 4.15), (2.60, 4.36), (3.30, 4.36),
    (4.02, 4.08), (4.42, 3.32), (4.45, 2.50),
    (4.35, 1.72), (3.90, 1.28), (3.45, 1.14),
    (3.00, 1.16), (2.42, 0.98), (1.86, 1.16), (1.45, 1.18), (1.17, 1.50),
)

# 6 x 5 m stadium: semicircle radius 2.5 m joined by 1 m straights,
# centered in an 8 x 7 m room, driven counter-clockwise
STADIUM_CONTROL_POINTS = (
    (4.5, 1.0), (5.35505, 1.150768), (6.106969, 1.584889), (6.665064, 2.25),
    (6.962019, 3.06588), (6.962019, 3.93412), (6.665064, 4.75),
    (6.106969, 5.415111), (5.35505, 5.849232), (4.5, 6.0), (3.5, 6.0),
    (2.64495, 5.849232), (1.893031, 5.415111), (1.334936, 4.75),
    (1.037981, 3.93412), (1.037981, 3.06588), (1.334936, 2.25),
    (1.893031, 1.584889), (2.64495, 1.150768), (3.5, 1.0),
)


def _nominal_track():
    return Track(Spline(NOMINAL_CONTROL_POINTS, closed=True),
                 lane_half_width=0.45, margin_width=0.10, has_center_dots=True)


def _generalization_track():
    return Track(Spline(STADIUM_CONTROL_POINTS, closed=True),
                 lane_half_width=0.45, margin_width=0.03, has_center_dots=False)


OBSTACLE_SIZE = (0.15, 0.15, 0.25)  # length, width, height


def _obstacle(oid, x, y, yaw=0.0):
    length, width, height = OBSTACLE_SIZE
    return Obstacle(id=oid, pose=Pose(x=x, y=y, yaw=yaw),
                    length=length, width=width, height=height)


# obstacle and start coordinates snapped onto the preset centerlines
# (the s= comments give the arc position along the track)
_PRESETS = {
    "N1": dict(
        room=ROOM_NOMINAL, track=_nominal_track, direction="CW",
        start=Pose(x=1.088585, y=2.099650, yaw=1.605247),       # s=0.20
        obstacles=(
            ("obs_a", 2.850055, 4.383855, 0.054847),   # s=3.60 top straight, after the top-left curve
            ("obs_b", 4.447321, 2.427156, -1.602341),  # s=6.60 right straight, after the top-right curve
        ),
    ),
    "N2": dict(
        room=ROOM_NOMINAL, track=_nominal_track, direction="CW",
        start=Pose(x=1.088585, y=2.099650, yaw=1.605247),       # s=0.20
        obstacles=(
            ("obs_a", 1.542924, 3.972881, 0.739989),   # s=2.20 directly on the top-left curve
            ("obs_b", 2.353532, 4.326395, 0.156108),   # s=3.10 immediately after it
        ),
    ),
    "G": dict(
        room=ROOM_GENERALIZATION, track=_generalization_track, direction="CCW",
        start=Pose(x=4.798533, y=1.029501, yaw=0.117274),       # s=0.30
        obstacles=(
            ("obs_a", 3.999946, 0.979061, -0.002563),  # s=17.20 bottom straight, fully visible
            ("obs_b", 6.548797, 2.068214, 0.963058),   # s=2.40 on the first arc, partially occluded
        ),
    ),
}


def build_scenario(name):
    """Materialize a preset scenario; raises LookupError for unknown names."""
    if name not in _PRESETS:
        raise LookupError(f"unknown scenario preset: {name!r}")
    spec = _PRESETS[name]
    return Scenario(
        name=name,
        room=spec["room"],
        track=spec["track"](),
        obstacles=[_obstacle(oid, x, y, yaw) for oid, x, y, yaw in spec["obstacles"]],
        start=spec["start"],
        direction=spec["direction"],
    )


PRESET_NAMES = tuple(_PRESETS)


# ---------------------------------------------------------------------------
# serialization (structured-text config, JSON encoded)

def scenario_to_dict(sc):
    return {
        "name": sc.name,
        "room": {
            "name": sc.room.name,
            "size": [sc.room.width, sc.room.depth],
            "floor_color": list(sc.room.floor_color),
            "wall_color": list(sc.room.wall_color),
            "floor_texture": sc.room.floor_texture,
        },
        "track": {
            "control_points": [list(p) for p in sc.track.center.control_points],
            "lane_half_width": sc.track.lane_half_width,
            "margin_width": sc.track.margin_width,
            "has_center_dots": sc.track.has_center_dots,
        },
        "obstacles": [
            {
                "id": o.id,
                "pose": [o.pose.x, o.pose.y, o.pose.z, o.pose.yaw],
                "size": [o.length, o.width, o.height],
                "color": list(o.color),
            }
            for o in sc.obstacles
        ],
        "start": [sc.start.x, sc.start.y, sc.start.z, sc.start.yaw],
        "direction": sc.direction,
        "vehicle": [sc.vehicle.length, sc.vehicle.width, sc.vehicle.height],
    }


def scenario_from_dict(data):
    room = Room(
        name=data["room"]["name"],
        width=data["room"]["size"][0],
        depth=data["room"]["size"][1],
        floor_color=tuple(data["room"]["floor_color"]),
        wall_color=tuple(data["room"]["wall_color"]),
        floor_texture=data["room"]["floor_texture"],
    )
    track = Track(
        Spline(tuple(tuple(p) for p in data["track"]["control_points"]), closed=True),
        lane_half_width=data["track"]["lane_half_width"],
        margin_width=data["track"]["margin_width"],
        has_center_dots=data["track"]["has_center_dots"],
    )
    obstacles = [
        Obstacle(
            id=o["id"],
            pose=Pose(x=o["pose"][0], y=o["pose"][1], z=o["pose"][2], yaw=o["pose"][3]),
            length=o["size"][0], width=o["size"][1], height=o["size"][2],
            color=tuple(o["color"]),
        )
        for o in data["obstacles"]
    ]
    start = Pose(x=data["start"][0], y=data["start"][1], z=data["start"][2], yaw=data["start"][3])
    vehicle = VehicleShape(*data.get("vehicle", (0.40, 0.25, 0.15)))
    return Scenario(name=data["name"], room=room, track=track, obstacles=obstacles,
                    start=start, direction=data["direction"], vehicle=vehicle)


def save_scenario(sc, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(sc), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_scenario(path):
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))
