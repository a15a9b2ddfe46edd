from gaplab.sensing.cloud import depth_to_cloud, project_points, sensor_to_vehicle, vehicle_to_world
from gaplab.sensing.io import read_depth, read_ppm, write_depth, write_ppm
from gaplab.sensing.noise import (
    STREAM_CAMPAIGN,
    STREAM_DEPTH,
    STREAM_RGB,
    apply_depth_noise,
    apply_rgb_noise,
    apply_sensor_noise,
    noise_rng,
)
from gaplab.sensing.render import camera_pose, render_depth, render_rgb, scene_geometry
from gaplab.sensing.types import (
    CameraIntrinsics,
    CameraMount,
    DepthImage,
    PointCloud,
    RenderMask,
    RGBAImage,
    RGBImage,
    RGB_INTRINSICS,
    RGB_MOUNT,
    TOF_INTRINSICS,
    TOF_MAX_RANGE,
    TOF_MIN_RANGE,
    TOF_MOUNT,
)

__all__ = [
    "CameraIntrinsics", "CameraMount", "DepthImage", "PointCloud", "RenderMask",
    "RGBAImage", "RGBImage", "RGB_INTRINSICS", "RGB_MOUNT", "TOF_INTRINSICS",
    "TOF_MAX_RANGE", "TOF_MIN_RANGE", "TOF_MOUNT",
    "apply_depth_noise", "apply_rgb_noise", "apply_sensor_noise", "noise_rng",
    "STREAM_CAMPAIGN", "STREAM_DEPTH", "STREAM_RGB",
    "camera_pose", "render_depth", "render_rgb", "scene_geometry",
    "depth_to_cloud", "project_points", "sensor_to_vehicle", "vehicle_to_world",
    "read_depth", "read_ppm", "write_depth", "write_ppm",
]
