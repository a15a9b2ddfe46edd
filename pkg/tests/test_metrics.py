import math

import numpy as np
import pytest

from gaplab.metrics import (
    EmptyCorrespondenceError,
    PerceptualPlugin,
    UndefinedEffectError,
    bbox_from_mask,
    cloud_stats,
    cohens_d,
    image_battery,
    iou,
    lane_alignment,
    mann_whitney_u,
)
from gaplab.plant import PerceptionGap
from gaplab.sensing import PointCloud, RGBImage, apply_sensor_noise, noise_rng


def random_image(rng, shape=(48, 64)):
    return RGBImage(rng.integers(0, 256, size=shape + (3,), dtype=np.uint8))


class TestImageBattery:
    def test_identity_fixed_points(self):
        rng = np.random.default_rng(0)
        img = random_image(rng)
        rep = image_battery(img, img)
        assert rep.ssim == pytest.approx(1.0, abs=1e-12)
        assert rep.mse == 0.0
        assert rep.kl_divergence == pytest.approx(0.0, abs=1e-12)
        assert rep.wasserstein == pytest.approx(0.0, abs=1e-12)
        assert rep.correlation == pytest.approx(1.0, abs=1e-12)
        assert rep.histogram_intersection == pytest.approx(1.0, abs=1e-12)
        assert rep.lbp_similarity == pytest.approx(1.0, abs=1e-12)
        assert rep.glcm_similarity == pytest.approx(1.0, abs=1e-12)
        assert rep.fractal_dimension_delta == 0.0
        assert rep.psnr == math.inf
        assert rep.perceptual_distance is None

    def test_noise_ladder_monotone(self):
        rng = np.random.default_rng(1)
        base_data = np.zeros((64, 64, 3), dtype=np.uint8)
        base_data[:, ::8, :] = 220  # structure so SSIM has texture to lose
        base_data[::8, :, :] = 180
        base = RGBImage(base_data)
        ssims, psnrs = [], []
        for k, sigma in enumerate((5.0, 10.0, 20.0)):
            noisy = apply_sensor_noise(base, PerceptionGap(rgb_sigma=sigma),
                                       noise_rng(2, 1, k))
            rep = image_battery(base, noisy)
            ssims.append(rep.ssim)
            psnrs.append(rep.psnr)
        ident = image_battery(base, base)
        assert all(s < ident.ssim for s in ssims)
        assert ssims[0] > ssims[1] > ssims[2]
        assert all(math.isfinite(p) for p in psnrs)
        assert psnrs[0] > psnrs[1] > psnrs[2]

    def test_mse_hand_example(self):
        a = RGBImage(np.array([[[0] * 3, [0] * 3], [[255] * 3, [255] * 3]], dtype=np.uint8))
        b = RGBImage(np.zeros((2, 2, 3), dtype=np.uint8))
        rep_mse = image_battery(a, b).mse
        assert rep_mse == pytest.approx((0 + 0 + 255**2 + 255**2) / 4.0)

    def test_dimension_mismatch(self):
        rng = np.random.default_rng(2)
        with pytest.raises(ValueError):
            image_battery(random_image(rng, (32, 32)), random_image(rng, (32, 33)))

    def test_perceptual_plugin_protocol(self, tmp_path):
        script = tmp_path / "dist.py"
        script.write_text(
            "import sys\n"
            "a, b = sys.argv[1], sys.argv[2]\n"
            "da = open(a, 'rb').read()\n"
            "db = open(b, 'rb').read()\n"
            "print(sum(x != y for x, y in zip(da, db)) / max(len(da), 1))\n")
        plugin = PerceptualPlugin(["python3", str(script)])
        rng = np.random.default_rng(3)
        img = random_image(rng)
        rep = image_battery(img, img, perceptual=plugin)
        assert rep.perceptual_distance == 0.0
        other = random_image(rng)
        rep2 = image_battery(img, other, perceptual=plugin)
        assert rep2.perceptual_distance > 0.0


class TestCloudStats:
    def make(self, pts, idx=None):
        return PointCloud(points=np.asarray(pts, dtype=np.float64), frame="sensor",
                          pixel_indices=idx)

    def test_identity(self):
        rng = np.random.default_rng(0)
        pts = rng.normal(size=(30, 3))
        c = self.make(pts, np.arange(30))
        st = cloud_stats(c, c)
        assert (st.mean, st.max, st.std) == (0.0, 0.0, 0.0)
        assert st.matched_count == 30

    def test_rigid_shift(self):
        rng = np.random.default_rng(1)
        pts = rng.normal(size=(25, 3))
        a = self.make(pts, np.arange(25))
        b = self.make(pts + np.array([0.1, 0.0, 0.0]), np.arange(25))
        st = cloud_stats(a, b)
        assert st.mean == pytest.approx(0.1, abs=1e-12)
        assert st.std == pytest.approx(0.0, abs=1e-12)

    def test_matches_bruteforce_loop(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            n = rng.integers(1, 21)
            pa = rng.normal(size=(n, 3))
            pb = rng.normal(size=(n, 3))
            st = cloud_stats(self.make(pa, np.arange(n)), self.make(pb, np.arange(n)))
            ds = [math.dist(tuple(x), tuple(y)) for x, y in zip(pa, pb)]
            assert st.mean == pytest.approx(float(np.mean(ds)), abs=1e-12)
            assert st.max == pytest.approx(float(np.max(ds)), abs=1e-12)
            assert st.mean <= st.max

    def test_unmatched_skipped_and_counted(self):
        a = self.make([[0, 0, 0], [1, 1, 1]], np.array([3, 5]))
        b = self.make([[0, 0, 1]], np.array([5]))
        st = cloud_stats(a, b)
        assert st.matched_count == 1
        assert st.skipped_count == 1

    def test_empty_correspondence_raises(self):
        a = self.make([[0, 0, 0]], np.array([1]))
        b = self.make([[0, 0, 0]], np.array([2]))
        with pytest.raises(EmptyCorrespondenceError):
            cloud_stats(a, b)


class TestIoU:
    def test_identical(self):
        assert iou((0, 0, 4, 4), (0, 0, 4, 4)) == 1.0

    def test_disjoint(self):
        assert iou((0, 0, 1, 1), (5, 5, 6, 6)) == 0.0

    def test_hand_example(self):
        assert iou((0, 0, 2, 2), (1, 0, 3, 2)) == pytest.approx(1.0 / 3.0)

    def test_symmetric_and_bounded(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            a = np.sort(rng.uniform(0, 10, 2))
            b = np.sort(rng.uniform(0, 10, 2))
            c = np.sort(rng.uniform(0, 10, 2))
            d = np.sort(rng.uniform(0, 10, 2))
            ba = (a[0], b[0], a[1] + 0.1, b[1] + 0.1)
            bb = (c[0], d[0], c[1] + 0.1, d[1] + 0.1)
            v1, v2 = iou(ba, bb), iou(bb, ba)
            assert v1 == v2
            assert 0.0 <= v1 <= 1.0

    def test_degenerate_zero_area(self):
        with pytest.warns(UserWarning):
            assert iou((0, 0, 0, 4), (0, 0, 2, 2)) == 0.0

    def test_bbox_from_mask(self):
        mask = np.zeros((10, 12), dtype=bool)
        mask[2:5, 3:7] = True
        assert bbox_from_mask(mask) == (3, 2, 7, 5)
        assert bbox_from_mask(np.zeros((4, 4), dtype=bool)) is None


class TestMannWhitney:
    def test_exact_small_sample(self):
        u, p = mann_whitney_u([1, 2, 3], [4, 5, 6])
        assert u == 0.0
        assert p == pytest.approx(0.1, abs=1e-12)

    def test_extreme_ranks_u_zero(self):
        u, _ = mann_whitney_u([1, 2], [10, 11, 12])
        assert u == 0.0
        u2, _ = mann_whitney_u([10, 11, 12], [1, 2])
        assert u2 == 6.0  # n1*n2 on the other side

    def test_identical_samples_p_one(self):
        _, p = mann_whitney_u([1, 2, 3, 4], [1, 2, 3, 4])
        assert p == pytest.approx(1.0)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            x = rng.normal(size=8)
            y = rng.normal(size=7) + 0.5
            _, p1 = mann_whitney_u(x, y)
            _, p2 = mann_whitney_u(np.exp(x), np.exp(y))
            assert p1 == pytest.approx(p2, abs=1e-12)

    def test_normal_approximation_large(self):
        rng = np.random.default_rng(5)
        x = rng.normal(0, 1, 40)
        y = rng.normal(1.0, 1, 40)
        _, p = mann_whitney_u(x, y)
        assert p < 0.01
        _, p_same = mann_whitney_u(x, x + 0.0)
        assert p_same > 0.5


class TestCohensD:
    def test_equal_samples_zero(self):
        x = [1.0, 2.0, 3.0]
        assert cohens_d(x, x) == 0.0

    def test_antisymmetric_and_affine_invariant(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            x = rng.normal(size=rng.integers(2, 12))
            y = rng.normal(loc=0.4, size=rng.integers(2, 12))
            d = cohens_d(x, y)
            assert cohens_d(y, x) == pytest.approx(-d, abs=1e-12)
            a, b = rng.uniform(0.2, 3.0), rng.uniform(-5, 5)
            assert cohens_d(a * x + b, a * y + b) == pytest.approx(d, abs=1e-9)

    def test_zero_variance_unequal_means(self):
        with pytest.raises(UndefinedEffectError):
            cohens_d([1.0, 1.0], [2.0, 2.0])


class TestLaneAlignment:
    ANCHORS = [(50, 230), (60, 180), (80, 130), (110, 80), (150, 30)]

    def test_identical_anchors_zero(self):
        assert lane_alignment(self.ANCHORS, self.ANCHORS) == 0.0

    def test_rigid_shift(self):
        shifted = [(x + 3, y) for x, y in self.ANCHORS]
        assert lane_alignment(self.ANCHORS, shifted) == pytest.approx(3.0, abs=1e-6)

    def test_matches_independent_sampling_oracle(self):
        # oracle: independent Barry-Goldman pyramid at the same parameters
        import numpy as np

        def oracle_curve(anchors, samples=100):
            pts = [np.array(p, dtype=float) for p in anchors]
            first = 2 * pts[0] - pts[1]
            last = 2 * pts[-1] - pts[-2]
            ctrl = [first] + pts + [last]

            def eval_seg(i, u):
                p = ctrl[i:i + 4]
                t = [0.0]
                for k in range(3):
                    t.append(t[-1] + max(np.linalg.norm(p[k + 1] - p[k]) ** 0.5, 1e-12))
                tt = t[1] + u * (t[2] - t[1])
                a1 = (t[1] - tt) / (t[1] - t[0]) * p[0] + (tt - t[0]) / (t[1] - t[0]) * p[1]
                a2 = (t[2] - tt) / (t[2] - t[1]) * p[1] + (tt - t[1]) / (t[2] - t[1]) * p[2]
                a3 = (t[3] - tt) / (t[3] - t[2]) * p[2] + (tt - t[2]) / (t[3] - t[2]) * p[3]
                b1 = (t[2] - tt) / (t[2] - t[0]) * a1 + (tt - t[0]) / (t[2] - t[0]) * a2
                b2 = (t[3] - tt) / (t[3] - t[1]) * a2 + (tt - t[1]) / (t[3] - t[1]) * a3
                return (t[2] - tt) / (t[2] - t[1]) * b1 + (tt - t[1]) / (t[2] - t[1]) * b2

            segs = len(ctrl) - 3
            out = []
            for k in range(samples):
                g = k / (samples - 1) * segs
                i = min(int(g), segs - 1)
                out.append(eval_seg(i, g - i))
            return np.array(out)

        curved_a = [(40, 230), (70, 170), (120, 120), (180, 90), (250, 70)]
        curved_b = [(45, 228), (80, 165), (125, 115), (190, 95), (255, 80)]
        got = lane_alignment(curved_a, curved_b)
        oa, ob = oracle_curve(curved_a), oracle_curve(curved_b)
        want = float(np.hypot(*(oa - ob).T).mean())
        assert got == pytest.approx(want, abs=1e-9)

    def test_too_few_anchors(self):
        with pytest.raises(ValueError):
            lane_alignment([(0, 0), (1, 1), (2, 2)], [(0, 0), (1, 1), (2, 2)])
