"""Synthetic camera and ToF depth rendering.

RGB uses a painter-order triangle rasterizer: floor, then walls, then
lane markings, then obstacles sorted far-to-near. The fixed order makes
compositing reproducible: rendering the full scene equals alpha-
compositing an obstacles-only overlay onto the obstacle-free background
byte for byte, which the mixed-reality path relies on.

Depth is a per-pixel ray cast against obstacle and wall boxes (the ToF
unit does not return the floor) storing planar z-depth; rays through
each pixel center are cached per intrinsics.
"""

import math
from dataclasses import dataclass

import numpy as np

from gaplab import _kernels
from gaplab.sensing.types import (
    DepthImage,
    RGBAImage,
    RenderMask,
    RGB_INTRINSICS,
    RGB_MOUNT,
    TOF_INTRINSICS,
    TOF_MAX_RANGE,
    TOF_MOUNT,
)

NEAR_PLANE = 0.05
LANE_COLOR = (235, 235, 235)
BACKGROUND_COLOR = (25, 25, 28)  # above-wall void when flattening RGBA
_LIGHT = np.array([0.30, 0.20, 0.93])
_LIGHT = _LIGHT / np.linalg.norm(_LIGHT)
_MARKING_STEP = 0.15
_DOT_LENGTH = 0.15
_DOT_GAP = 0.20
_DOT_WIDTH = 0.03


def _shade(color, normal):
    f = 0.72 + 0.28 * max(0.0, float(np.dot(normal, _LIGHT)))
    return tuple(min(255, int(round(c * f))) for c in color)


def _box_triangles(cx, cy, cz, hx, hy, hz, yaw, color):
    c, s = math.cos(yaw), math.sin(yaw)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    corners = np.array([[sx * hx, sy * hy, sz * hz]
                        for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)])
    corners = corners @ rot.T + np.array([cx, cy, cz])
    # faces as corner indices (sx, sy, sz order above), outward normals local
    faces = [
        ((4, 5, 7, 6), (1, 0, 0)), ((0, 2, 3, 1), (-1, 0, 0)),
        ((2, 6, 7, 3), (0, 1, 0)), ((0, 1, 5, 4), (0, -1, 0)),
        ((1, 3, 7, 5), (0, 0, 1)), ((0, 4, 6, 2), (0, 0, -1)),
    ]
    tris, cols = [], []
    for idx, normal in faces:
        n_world = rot @ np.array(normal, dtype=np.float64)
        col = _shade(color, n_world)
        quad = corners[list(idx)]
        tris.append([quad[0], quad[1], quad[2]])
        tris.append([quad[0], quad[2], quad[3]])
        cols.extend([col, col])
    return tris, cols


def _quad(p0, p1, p2, p3, color):
    return [[p0, p1, p2], [p0, p2, p3]], [color, color]


def _lane_marking_triangles(track):
    pts, seg, seg_len, cum, tangents = track.table
    tris, cols = [], []
    length = track.length
    # margin bands on both lane edges, inner edge at the lane boundary
    n_steps = int(length / _MARKING_STEP)
    for side in (1.0, -1.0):
        inner = side * track.lane_half_width
        outer = side * (track.lane_half_width + track.margin_width)
        for k in range(n_steps):
            s0 = k * length / n_steps
            s1 = (k + 1) * length / n_steps
            (x0, y0), (tx0, ty0) = track.point_at(s0)
            (x1, y1), (tx1, ty1) = track.point_at(s1)
            n0 = (-ty0, tx0)
            n1 = (-ty1, tx1)
            p0 = (x0 + n0[0] * inner, y0 + n0[1] * inner, 0.0)
            p1 = (x1 + n1[0] * inner, y1 + n1[1] * inner, 0.0)
            p2 = (x1 + n1[0] * outer, y1 + n1[1] * outer, 0.0)
            p3 = (x0 + n0[0] * outer, y0 + n0[1] * outer, 0.0)
            t, cl = _quad(np.array(p0), np.array(p1), np.array(p2), np.array(p3), LANE_COLOR)
            tris.extend(t)
            cols.extend(cl)
    if track.has_center_dots:
        s = 0.0
        while s + _DOT_LENGTH < length:
            (x0, y0), (tx0, ty0) = track.point_at(s)
            (x1, y1), (tx1, ty1) = track.point_at(s + _DOT_LENGTH)
            n0 = (-ty0 * _DOT_WIDTH / 2, tx0 * _DOT_WIDTH / 2)
            n1 = (-ty1 * _DOT_WIDTH / 2, tx1 * _DOT_WIDTH / 2)
            t, cl = _quad(
                np.array((x0 + n0[0], y0 + n0[1], 0.0)),
                np.array((x1 + n1[0], y1 + n1[1], 0.0)),
                np.array((x1 - n1[0], y1 - n1[1], 0.0)),
                np.array((x0 - n0[0], y0 - n0[1], 0.0)),
                LANE_COLOR,
            )
            tris.extend(t)
            cols.extend(cl)
            s += _DOT_LENGTH + _DOT_GAP
    return tris, cols


class SceneGeometry:
    """World-frame triangles and boxes for one scenario, built once."""

    def __init__(self, scenario):
        room = scenario.room
        w, d = room.width, room.depth
        floor_tris, floor_cols = _quad(
            np.array((0.0, 0.0, 0.0)), np.array((w, 0.0, 0.0)),
            np.array((w, d, 0.0)), np.array((0.0, d, 0.0)), room.floor_color)
        self.floor = (np.array(floor_tris), np.array(floor_cols, dtype=np.float64))

        wall_tris, wall_cols = [], []
        wall_boxes = []
        for bx in room.wall_boxes():
            t, cl = _box_triangles(*bx, color=room.wall_color)
            wall_tris.extend(t)
            wall_cols.extend(cl)
            cx, cy, cz, hx, hy, hz, yaw = bx
            wall_boxes.append([cx, cy, cz, hx, hy, hz, math.cos(yaw), math.sin(yaw)])
        self.walls = (np.array(wall_tris), np.array(wall_cols, dtype=np.float64))
        self.wall_boxes = np.array(wall_boxes)

        lane_tris, lane_cols = _lane_marking_triangles(scenario.track)
        self.lane_markings = (np.array(lane_tris), np.array(lane_cols, dtype=np.float64))

        self.obstacles = []
        obstacle_boxes = []
        for obs in scenario.obstacles:
            t, cl = _box_triangles(obs.pose.x, obs.pose.y, obs.height / 2,
                                   obs.length / 2, obs.width / 2, obs.height / 2,
                                   obs.pose.yaw, color=obs.color)
            self.obstacles.append(
                ((obs.pose.x, obs.pose.y, obs.height / 2), np.array(t),
                 np.array(cl, dtype=np.float64)))
            obstacle_boxes.append([obs.pose.x, obs.pose.y, obs.height / 2,
                                   obs.length / 2, obs.width / 2, obs.height / 2,
                                   math.cos(obs.pose.yaw), math.sin(obs.pose.yaw)])
        self.obstacle_boxes = (np.array(obstacle_boxes) if obstacle_boxes
                               else np.zeros((0, 8)))


def scene_geometry(scenario):
    scene = scenario.__dict__.get("_scene_geometry")
    if scene is None:
        scene = SceneGeometry(scenario)
        scenario.__dict__["_scene_geometry"] = scene
    return scene


# ---------------------------------------------------------------------------
# camera transforms

def camera_pose(vehicle_pose, mount):
    """Camera origin (world) and rotation world<-sensor."""
    c, s = math.cos(vehicle_pose.yaw), math.sin(vehicle_pose.yaw)
    origin = np.array([
        vehicle_pose.x + c * mount.x - s * mount.y,
        vehicle_pose.y + s * mount.x + c * mount.y,
        vehicle_pose.z + mount.z,
    ])
    r_wv = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return origin, r_wv @ mount.rotation_vehicle_from_sensor()


_DIR_CACHE = {}


def _sensor_dirs(intrinsics):
    key = (intrinsics.fx, intrinsics.fy, intrinsics.cx, intrinsics.cy,
           intrinsics.width, intrinsics.height)
    dirs = _DIR_CACHE.get(key)
    if dirs is None:
        ii, jj = np.meshgrid(np.arange(intrinsics.width, dtype=np.float64),
                             np.arange(intrinsics.height, dtype=np.float64))
        dirs = np.column_stack([
            ((ii - intrinsics.cx) / intrinsics.fx).ravel(),
            ((jj - intrinsics.cy) / intrinsics.fy).ravel(),
            np.ones(intrinsics.width * intrinsics.height),
        ])
        _DIR_CACHE[key] = dirs
    return dirs


# ---------------------------------------------------------------------------
# depth

def render_depth(scenario, vehicle_pose, intrinsics=TOF_INTRINSICS,
                 mask=None, mount=TOF_MOUNT, max_range=TOF_MAX_RANGE):
    """Ray-cast depth against obstacle and wall boxes; sentinel elsewhere."""
    mask = mask if mask is not None else RenderMask.full()
    scene = scene_geometry(scenario)
    groups = []
    if mask.obstacles and scene.obstacle_boxes.shape[0]:
        groups.append(scene.obstacle_boxes)
    if mask.walls:
        groups.append(scene.wall_boxes)
    boxes = np.vstack(groups) if groups else np.zeros((0, 8))

    origin, r_ws = camera_pose(vehicle_pose, mount)
    dirs_sensor = _sensor_dirs(intrinsics)
    # explicit component products keep both kernel backends bit-identical
    dirs_world = np.empty_like(dirs_sensor)
    for k in range(3):
        dirs_world[:, k] = (dirs_sensor[:, 0] * r_ws[k, 0]
                            + dirs_sensor[:, 1] * r_ws[k, 1]
                            + dirs_sensor[:, 2] * r_ws[k, 2])
    sentinel = max_range + 1.0
    depths = _kernels.raycast_boxes(origin, dirs_world, boxes, NEAR_PLANE,
                                    max_range, sentinel)
    return DepthImage(depths.reshape(intrinsics.height, intrinsics.width),
                      max_range=max_range)


# ---------------------------------------------------------------------------
# rgb rasterizer

def _clip_near(tri_cam):
    """Clip one camera-frame triangle against z = NEAR_PLANE; returns triangles."""
    inside = tri_cam[:, 2] >= NEAR_PLANE
    n_in = int(inside.sum())
    if n_in == 0:
        return []
    if n_in == 3:
        return [tri_cam]
    poly = []
    for k in range(3):
        a, b = tri_cam[k], tri_cam[(k + 1) % 3]
        ain, bin_ = inside[k], inside[(k + 1) % 3]
        if ain:
            poly.append(a)
        if ain != bin_:
            t = (NEAR_PLANE - a[2]) / (b[2] - a[2])
            poly.append(a + t * (b - a))
    if len(poly) < 3:
        return []
    poly = np.asarray(poly)
    return [np.stack([poly[0], poly[k], poly[k + 1]]) for k in range(1, len(poly) - 1)]


def _raster_triangle(buf, tri2d, color, width, height):
    (x0, y0), (x1, y1), (x2, y2) = tri2d
    area = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
    if area == 0.0:
        return
    if area < 0.0:
        x1, y1, x2, y2 = x2, y2, x1, y1
    ix0 = max(int(math.ceil(min(x0, x1, x2))), 0)
    ix1 = min(int(math.floor(max(x0, x1, x2))), width - 1)
    iy0 = max(int(math.ceil(min(y0, y1, y2))), 0)
    iy1 = min(int(math.floor(max(y0, y1, y2))), height - 1)
    if ix0 > ix1 or iy0 > iy1:
        return
    xs = np.arange(ix0, ix1 + 1, dtype=np.float64)
    ys = np.arange(iy0, iy1 + 1, dtype=np.float64)[:, None]
    e0 = (x1 - x0) * (ys - y0) - (y1 - y0) * (xs - x0)
    e1 = (x2 - x1) * (ys - y1) - (y2 - y1) * (xs - x1)
    e2 = (x0 - x2) * (ys - y2) - (y0 - y2) * (xs - x2)
    cover = (e0 >= 0.0) & (e1 >= 0.0) & (e2 >= 0.0)
    if not cover.any():
        return
    region = buf[iy0:iy1 + 1, ix0:ix1 + 1]
    region[cover] = (color[0], color[1], color[2], 255)


def _draw_triangles(buf, tris, cols, origin, r_ws, intrinsics):
    if len(tris) == 0:
        return
    r_sw = r_ws.T
    verts = np.asarray(tris, dtype=np.float64)  # (T, 3, 3)
    flat = verts.reshape(-1, 3) - origin
    cam = flat @ r_sw.T
    cam = cam.reshape(-1, 3, 3)
    width, height = intrinsics.width, intrinsics.height
    for t in range(cam.shape[0]):
        for piece in _clip_near(cam[t]):
            z = piece[:, 2]
            u = piece[:, 0] / z * intrinsics.fx + intrinsics.cx
            v = piece[:, 1] / z * intrinsics.fy + intrinsics.cy
            _raster_triangle(buf, np.column_stack([u, v]), cols[t], width, height)


def render_rgb(scenario, vehicle_pose, intrinsics=RGB_INTRINSICS,
               mask=None, mount=RGB_MOUNT):
    """Painter-order rasterization of the masked scene classes.

    Covered pixels carry alpha 255, untouched pixels alpha 0 (rgb 0).
    """
    mask = mask if mask is not None else RenderMask.full()
    scene = scene_geometry(scenario)
    origin, r_ws = camera_pose(vehicle_pose, mount)
    buf = np.zeros((intrinsics.height, intrinsics.width, 4), dtype=np.uint8)

    if mask.floor:
        _draw_triangles(buf, *scene.floor, origin, r_ws, intrinsics)
    if mask.walls:
        _draw_triangles(buf, *scene.walls, origin, r_ws, intrinsics)
    if mask.lane_markings:
        _draw_triangles(buf, *scene.lane_markings, origin, r_ws, intrinsics)
    if mask.obstacles and scene.obstacles:
        order = sorted(
            range(len(scene.obstacles)),
            key=lambda k: -((scene.obstacles[k][0][0] - origin[0]) ** 2
                            + (scene.obstacles[k][0][1] - origin[1]) ** 2))
        for k in order:
            _, tris, cols = scene.obstacles[k]
            _draw_triangles(buf, tris, cols, origin, r_ws, intrinsics)
    return RGBAImage(buf)
