"""Sensor mixing and the modality wiring table.

The four testing modalities differ only in where perception comes from,
which plant the commands drive, and whether the simulator is slaved to
the (pseudo-)real pose:

    SIL: sim perception,   twin plant,        no injection
    RW:  real perception,  pseudo-real plant, no injection
    VIL: sim perception,   pseudo-real plant, pose injection + mirroring
    MR:  mixed perception, pseudo-real plant, pose injection + mirroring

RGB mixing composites the simulated RGBA overlay onto the real frame
with integer round-half-up alpha blending; depth mixing takes the
pointwise closer return, so virtual objects can occlude real ones.
"""

import enum
from dataclasses import dataclass, replace

import numpy as np

from gaplab.sensing.render import render_depth, render_rgb
from gaplab.sensing.types import DepthImage, RenderMask, RGBAImage, RGBImage


class Modality(enum.Enum):
    SIL = "SIL"
    VIL = "VIL"
    MR = "MR"
    RW = "RW"


@dataclass(frozen=True)
class ModalityWiring:
    perception_source: str  # sim | real | mixed
    plant: str              # twin | pseudo_real
    pose_injection: bool
    obstacle_mirroring: bool


WIRING = {
    Modality.SIL: ModalityWiring("sim", "twin", False, False),
    Modality.RW: ModalityWiring("real", "pseudo_real", False, False),
    Modality.VIL: ModalityWiring("sim", "pseudo_real", True, True),
    Modality.MR: ModalityWiring("mixed", "pseudo_real", True, True),
}


class WiringError(RuntimeError):
    pass


class RegistrationError(KeyError):
    pass


def mix_rgb(real, overlay):
    """Alpha-composite the overlay onto the real frame (round-half-up)."""
    if (real.width, real.height) != (overlay.width, overlay.height):
        raise ValueError("image dimensions must match")
    alpha = overlay.data[:, :, 3:4].astype(np.uint32)
    sim = overlay.data[:, :, :3].astype(np.uint32)
    base = real.data.astype(np.uint32)
    num = alpha * sim + (255 - alpha) * base
    out = (2 * num + 255) // 510
    return RGBImage(out.astype(np.uint8))


def mix_depth(real, sim):
    """Pointwise closer return; the sentinel survives only if both miss."""
    if real.data.shape != sim.data.shape:
        raise ValueError("depth dimensions must match")
    if real.max_range != sim.max_range:
        raise ValueError("depth max_range must match")
    return DepthImage(np.minimum(real.data, sim.data), max_range=real.max_range)


@dataclass(frozen=True)
class FramePair:
    rgb: object = None    # RGBImage, or RGBAImage for overlay renders
    depth: object = None  # DepthImage


class SimWorld:
    """The simulator's view of the scene for ViL/MR pose injection.

    The vehicle pose is hard-set from the tracked pose (no filtering);
    tracked obstacles are mirrored by id. Rendering happens at the
    injected pose.
    """

    def __init__(self, scenario):
        self._base = scenario
        self.scenario = scenario
        self.vehicle_pose = scenario.start

    def inject_pose(self, real_pose, obstacles=()):
        self.vehicle_pose = real_pose
        if obstacles:
            known = {o.id for o in self.scenario.obstacles}
            updates = {}
            for obs in obstacles:
                if obs.id not in known:
                    raise RegistrationError(obs.id)
                updates[obs.id] = obs.pose
            new_list = []
            changed = False
            for o in self.scenario.obstacles:
                target = updates.get(o.id)
                if target is not None and target != o.pose:
                    new_list.append(replace(o, pose=target))
                    changed = True
                else:
                    new_list.append(o)
            if changed:
                self.scenario = replace(self.scenario, obstacles=new_list)
        return self.vehicle_pose

    def render(self, mask, rgb=False, depth=False, rgb_intrinsics=None,
               depth_intrinsics=None):
        out = {}
        if rgb:
            kwargs = {"mask": mask}
            if rgb_intrinsics is not None:
                kwargs["intrinsics"] = rgb_intrinsics
            out["rgb"] = render_rgb(self.scenario, self.vehicle_pose, **kwargs)
        if depth:
            kwargs = {"mask": mask}
            if depth_intrinsics is not None:
                kwargs["intrinsics"] = depth_intrinsics
            out["depth"] = render_depth(self.scenario, self.vehicle_pose, **kwargs)
        return out


def inject_pose(sim_world, real_pose, obstacles=()):
    return sim_world.inject_pose(real_pose, obstacles)


def compose_frame(wiring, real_frames, sim_frames):
    """The (rgb, depth) pair the ADS sees under the given wiring."""
    if wiring.perception_source == "sim":
        if sim_frames is None or sim_frames.rgb is None or sim_frames.depth is None:
            raise WiringError("sim wiring requires simulated rgb and depth streams")
        rgb = sim_frames.rgb
        if isinstance(rgb, RGBAImage):
            raise WiringError("sim wiring expects a flattened RGB stream")
        return rgb, sim_frames.depth
    if wiring.perception_source == "real":
        if real_frames is None or real_frames.rgb is None or real_frames.depth is None:
            raise WiringError("real wiring requires real rgb and depth streams")
        return real_frames.rgb, real_frames.depth
    if wiring.perception_source == "mixed":
        if (real_frames is None or real_frames.rgb is None or real_frames.depth is None
                or sim_frames is None or sim_frames.rgb is None or sim_frames.depth is None):
            raise WiringError("mixed wiring requires both real and simulated streams")
        if not isinstance(sim_frames.rgb, RGBAImage):
            raise WiringError("mixed wiring expects an RGBA overlay stream")
        return (mix_rgb(real_frames.rgb, sim_frames.rgb),
                mix_depth(real_frames.depth, sim_frames.depth))
    raise WiringError(f"unknown perception source {wiring.perception_source!r}")
