import numpy as np
import pytest

from gaplab.geometry import Pose
from gaplab.mixing import (
    FramePair,
    Modality,
    ModalityWiring,
    RegistrationError,
    SimWorld,
    WIRING,
    WiringError,
    compose_frame,
    inject_pose,
    mix_depth,
    mix_rgb,
)
from gaplab.sensing import DepthImage, RenderMask, RGBAImage, RGBImage, render_depth, render_rgb
from gaplab.world import build_scenario

SENTINEL = np.float32(6.0)


def rgba(rgb_value, alpha_value, shape=(8, 10)):
    buf = np.zeros(shape + (4,), dtype=np.uint8)
    buf[:, :, :3] = rgb_value
    buf[:, :, 3] = alpha_value
    return RGBAImage(buf)


def rgb(value, shape=(8, 10)):
    return RGBImage(np.full(shape + (3,), value, dtype=np.uint8))


class TestMixRgb:
    def test_alpha_zero_identity(self):
        rng = np.random.default_rng(0)
        real = RGBImage(rng.integers(0, 256, size=(8, 10, 3), dtype=np.uint8))
        out = mix_rgb(real, rgba(200, 0))
        assert out.data.tobytes() == real.data.tobytes()

    def test_alpha_full_replacement(self):
        overlay = rgba(200, 255)
        out = mix_rgb(rgb(100), overlay)
        assert (out.data == 200).all()

    def test_half_alpha_rounds_half_up(self):
        # (128*200 + 127*100) / 255 = 150.196 -> 150
        out = mix_rgb(rgb(100), rgba(200, 128))
        assert (out.data == 150).all()

    def test_monotone_in_alpha(self):
        real, sim = 40, 220
        prev = None
        for a in range(0, 256, 5):
            out = int(mix_rgb(rgb(real), rgba(sim, a)).data[0, 0, 0])
            if prev is not None:
                assert out >= prev
            prev = out

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mix_rgb(rgb(10, shape=(8, 10)), rgba(10, 255, shape=(8, 11)))


class TestMixDepth:
    def test_pointwise_min_matches_loop(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            a = rng.uniform(0.2, 6.0, size=(12, 16)).astype(np.float32)
            b = rng.uniform(0.2, 6.0, size=(12, 16)).astype(np.float32)
            out = mix_depth(DepthImage(a), DepthImage(b))
            for j in range(12):
                for i in range(16):
                    assert out.data[j, i] == min(a[j, i], b[j, i])

    def test_sentinel_overlay_identity(self):
        rng = np.random.default_rng(2)
        real = DepthImage(rng.uniform(0.2, 4.0, size=(12, 16)).astype(np.float32))
        sim = DepthImage(np.full((12, 16), SENTINEL, dtype=np.float32))
        out = mix_depth(real, sim)
        assert out.data.tobytes() == real.data.tobytes()

    def test_commutative_and_idempotent(self):
        rng = np.random.default_rng(3)
        a = DepthImage(rng.uniform(0.2, 6.0, size=(6, 7)).astype(np.float32))
        b = DepthImage(rng.uniform(0.2, 6.0, size=(6, 7)).astype(np.float32))
        assert mix_depth(a, b).data.tobytes() == mix_depth(b, a).data.tobytes()
        assert mix_depth(a, a).data.tobytes() == a.data.tobytes()

    def test_closer_value_wins(self):
        real = DepthImage(np.full((4, 4), 2.0, dtype=np.float32))
        sim = DepthImage(np.full((4, 4), 1.2, dtype=np.float32))
        assert (mix_depth(real, sim).data == np.float32(1.2)).all()


class TestWiringTable:
    def test_matches_modality_definitions(self):
        assert WIRING[Modality.SIL] == ModalityWiring("sim", "twin", False, False)
        assert WIRING[Modality.RW] == ModalityWiring("real", "pseudo_real", False, False)
        assert WIRING[Modality.VIL] == ModalityWiring("sim", "pseudo_real", True, True)
        assert WIRING[Modality.MR] == ModalityWiring("mixed", "pseudo_real", True, True)


class TestInjectPose:
    def test_round_trip_exact(self):
        world = SimWorld(build_scenario("N1"))
        p = Pose(x=1.234567891234, y=2.98765432109, yaw=0.777)
        inject_pose(world, p)
        assert world.vehicle_pose is p

    def test_obstacle_mirroring(self):
        sc = build_scenario("N1")
        world = SimWorld(sc)
        moved = sc.obstacles[0]
        new_pose = Pose(x=1.0, y=0.5, yaw=0.0)
        from dataclasses import replace
        inject_pose(world, sc.start, [replace(moved, pose=new_pose)])
        assert world.scenario.obstacle_by_id(moved.id).pose == new_pose

    def test_unknown_obstacle_rejected(self):
        sc = build_scenario("N1")
        world = SimWorld(sc)
        ghost = sc.obstacles[0]
        from dataclasses import replace
        with pytest.raises(RegistrationError):
            inject_pose(world, sc.start, [replace(ghost, id="nope")])

    def test_mr_render_after_injection_matches_pseudo_real_projection(self):
        # both the MR overlay and a pseudo-real obstacle render at the same
        # injected pose must put the obstacle blob at the same pixels
        sc = build_scenario("N1")
        world = SimWorld(sc)
        obs = sc.obstacles[0]
        pose = Pose(x=obs.pose.x - 1.3, y=obs.pose.y, yaw=0.0)
        inject_pose(world, pose)
        overlay = world.render(RenderMask.obstacles_only(), rgb=True)["rgb"]
        direct = render_rgb(sc, pose, mask=RenderMask.obstacles_only())
        a1 = np.nonzero(overlay.alpha == 255)
        a2 = np.nonzero(direct.alpha == 255)
        c1 = (a1[1].mean(), a1[0].mean())
        c2 = (a2[1].mean(), a2[0].mean())
        assert abs(c1[0] - c2[0]) < 2.0 and abs(c1[1] - c2[1]) < 2.0


class TestComposeFrame:
    def test_sil_passthrough(self):
        sc = build_scenario("N1")
        sim_rgb = render_rgb(sc, sc.start).over_background((25, 25, 28))
        sim_depth = render_depth(sc, sc.start)
        out_rgb, out_depth = compose_frame(WIRING[Modality.SIL], None,
                                           FramePair(rgb=sim_rgb, depth=sim_depth))
        assert out_rgb.data.tobytes() == sim_rgb.data.tobytes()
        assert out_depth.data.tobytes() == sim_depth.data.tobytes()

    def test_mr_with_empty_overlay_is_real_identity(self):
        sc = build_scenario("N1")
        real_rgb = render_rgb(sc, sc.start, mask=RenderMask.background()).over_background((25, 25, 28))
        real_depth = render_depth(sc, sc.start, mask=RenderMask(obstacles=False))
        empty_overlay = rgba(0, 0, shape=(real_rgb.height, real_rgb.width))
        all_sentinel = DepthImage(np.full(real_depth.data.shape,
                                          real_depth.sentinel, dtype=np.float32),
                                  max_range=real_depth.max_range)
        out_rgb, out_depth = compose_frame(WIRING[Modality.MR],
                                           FramePair(rgb=real_rgb, depth=real_depth),
                                           FramePair(rgb=empty_overlay, depth=all_sentinel))
        assert out_rgb.data.tobytes() == real_rgb.data.tobytes()
        assert out_depth.data.tobytes() == real_depth.data.tobytes()

    def test_missing_stream_raises(self):
        with pytest.raises(WiringError):
            compose_frame(WIRING[Modality.MR], None, None)
        with pytest.raises(WiringError):
            compose_frame(WIRING[Modality.SIL], FramePair(), FramePair())

    def test_mr_composite_equals_full_render(self):
        # with a zero gap, compositing the obstacle overlay onto the
        # obstacle-free background reproduces the full render byte-exactly
        sc = build_scenario("N2")
        pose = sc.start
        background = render_rgb(sc, pose, mask=RenderMask.background()).over_background((25, 25, 28))
        overlay = render_rgb(sc, pose, mask=RenderMask.obstacles_only())
        full = render_rgb(sc, pose).over_background((25, 25, 28))
        mixed = mix_rgb(background, overlay)
        assert mixed.data.tobytes() == full.data.tobytes()

        bg_depth = render_depth(sc, pose, mask=RenderMask(obstacles=False))
        ov_depth = render_depth(sc, pose, mask=RenderMask.obstacles_only())
        full_depth = render_depth(sc, pose)
        assert mix_depth(bg_depth, ov_depth).data.tobytes() == full_depth.data.tobytes()
