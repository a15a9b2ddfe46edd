"""Image similarity battery: eleven built-in metrics plus a plug-in slot.

Frozen definitions (the source material names the metrics only):
  * luma: ITU-R BT.601, 0.299 R + 0.587 G + 0.114 B
  * correlation / MSE / PSNR / SSIM: computed per channel, averaged
  * SSIM: sliding 8x8 uniform windows, K1 = 0.01, K2 = 0.03, L = 255
  * histograms: 256 bins over luma
  * LBP: radius-1 8-neighbor codes, uniform patterns (58 + 1 bins),
    similarity = histogram intersection
  * NMI: Studholme (H(A)+H(B))/H(A,B) over 64-level luma
  * fractal dimension: box counting over a gradient edge map
    (|dx|+|dy| > 32), box sizes 2..64, reported as |dim_a - dim_b|
  * KL divergence: 256-bin luma histograms, 1e-10 smoothing, nats
  * GLCM: distance 1, angles 0/45/90/135 deg, 32 gray levels,
    symmetric; cosine similarity of (contrast, homogeneity, energy)
  * Wasserstein: 1-D earth mover distance between luma histograms,
    in gray-level units

The perceptual-distance slot accepts an external command (two image
paths in, one scalar out); the built-in battery therefore has eleven of
the twelve metrics.
"""

import math
import os
import subprocess
import tempfile
from dataclasses import dataclass

import numpy as np

from gaplab.sensing.io import write_ppm
from gaplab.sensing.types import RGBImage

EDGE_THRESHOLD = 32.0
BOX_SIZES = (2, 4, 8, 16, 32, 64)
GLCM_LEVELS = 32
SSIM_WINDOW = 8
_K1, _K2, _L = 0.01, 0.03, 255.0


@dataclass(frozen=True)
class ImageMetricReport:
    correlation: float
    histogram_intersection: float
    lbp_similarity: float
    psnr: float
    ssim: float
    nmi: float
    fractal_dimension_delta: float
    kl_divergence: float
    mse: float
    glcm_similarity: float
    wasserstein: float
    perceptual_distance: float | None = None

    def as_dict(self):
        return {
            "correlation": self.correlation,
            "histogram_intersection": self.histogram_intersection,
            "lbp_similarity": self.lbp_similarity,
            "psnr": self.psnr,
            "ssim": self.ssim,
            "nmi": self.nmi,
            "fractal_dimension_delta": self.fractal_dimension_delta,
            "kl_divergence": self.kl_divergence,
            "mse": self.mse,
            "glcm_similarity": self.glcm_similarity,
            "wasserstein": self.wasserstein,
            "perceptual_distance": self.perceptual_distance,
        }


def luma(image):
    d = image.data.astype(np.float64)
    return 0.299 * d[:, :, 0] + 0.587 * d[:, :, 1] + 0.114 * d[:, :, 2]


def _luma_hist(image, bins=256):
    values = np.clip(np.rint(luma(image)), 0, 255).astype(np.int64)
    h = np.bincount(values.ravel(), minlength=bins).astype(np.float64)
    return h / h.sum()


def correlation(a, b):
    da = a.data.astype(np.float64)
    db = b.data.astype(np.float64)
    out = []
    for c in range(3):
        x, y = da[:, :, c].ravel(), db[:, :, c].ravel()
        sx, sy = x.std(), y.std()
        if sx == 0.0 or sy == 0.0:
            out.append(1.0 if np.array_equal(x, y) else 0.0)
        else:
            out.append(float(np.corrcoef(x, y)[0, 1]))
    return float(np.mean(out))


def mse(a, b):
    da = a.data.astype(np.float64)
    db = b.data.astype(np.float64)
    return float(((da - db) ** 2).mean())


def psnr(a, b):
    err = mse(a, b)
    if err == 0.0:
        return math.inf
    return float(10.0 * math.log10(_L * _L / err))


def _box_mean(x, w):
    c = np.cumsum(np.cumsum(x, axis=0), axis=1)
    c = np.pad(c, ((1, 0), (1, 0)))
    s = c[w:, w:] - c[:-w, w:] - c[w:, :-w] + c[:-w, :-w]
    return s / (w * w)


def ssim(a, b):
    """Mean SSIM over sliding 8x8 uniform windows, averaged across channels."""
    c1 = (_K1 * _L) ** 2
    c2 = (_K2 * _L) ** 2
    w = SSIM_WINDOW
    da = a.data.astype(np.float64)
    db = b.data.astype(np.float64)
    vals = []
    for c in range(3):
        x, y = da[:, :, c], db[:, :, c]
        mx = _box_mean(x, w)
        my = _box_mean(y, w)
        mxx = _box_mean(x * x, w)
        myy = _box_mean(y * y, w)
        mxy = _box_mean(x * y, w)
        vx = mxx - mx * mx
        vy = myy - my * my
        cov = mxy - mx * my
        s = ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2))
        vals.append(float(s.mean()))
    return float(np.mean(vals))


def histogram_intersection(a, b):
    return float(np.minimum(_luma_hist(a), _luma_hist(b)).sum())


def kl_divergence(a, b, eps=1e-10):
    p = _luma_hist(a) + eps
    q = _luma_hist(b) + eps
    p /= p.sum()
    q /= q.sum()
    return float((p * np.log(p / q)).sum())


def wasserstein(a, b):
    """1-D EMD between luma histograms, in gray levels."""
    return float(np.abs(np.cumsum(_luma_hist(a) - _luma_hist(b))).sum())


_UNIFORM_LUT = None


def _uniform_lut():
    global _UNIFORM_LUT
    if _UNIFORM_LUT is None:
        lut = np.full(256, 58, dtype=np.int64)  # non-uniform bucket
        next_id = 0
        for code in range(256):
            bits = [(code >> k) & 1 for k in range(8)]
            transitions = sum(bits[k] != bits[(k + 1) % 8] for k in range(8))
            if transitions <= 2:
                lut[code] = next_id
                next_id += 1
        _UNIFORM_LUT = lut
    return _UNIFORM_LUT


def _lbp_hist(image):
    g = luma(image)
    center = g[1:-1, 1:-1]
    offsets = [(-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1)]
    code = np.zeros(center.shape, dtype=np.int64)
    for bit, (dy, dx) in enumerate(offsets):
        neighbor = g[1 + dy:g.shape[0] - 1 + dy, 1 + dx:g.shape[1] - 1 + dx]
        code |= (neighbor >= center).astype(np.int64) << bit
    binned = _uniform_lut()[code]
    h = np.bincount(binned.ravel(), minlength=59).astype(np.float64)
    total = h.sum()
    if total == 0.0:  # image too small for an interior; degenerate bucket
        h[58] = 1.0
        return h
    return h / total


def lbp_similarity(a, b):
    return float(np.minimum(_lbp_hist(a), _lbp_hist(b)).sum())


def nmi(a, b, levels=64):
    qa = np.clip(np.rint(luma(a)), 0, 255).astype(np.int64) * levels // 256
    qb = np.clip(np.rint(luma(b)), 0, 255).astype(np.int64) * levels // 256
    joint = np.bincount((qa * levels + qb).ravel(), minlength=levels * levels)
    joint = joint.astype(np.float64) / joint.sum()
    pa = joint.reshape(levels, levels).sum(axis=1)
    pb = joint.reshape(levels, levels).sum(axis=0)

    def entropy(p):
        nz = p[p > 0]
        return float(-(nz * np.log(nz)).sum())

    hj = entropy(joint)
    if hj == 0.0:
        return 2.0
    return float((entropy(pa) + entropy(pb)) / hj)


def fractal_dimension(image):
    """Box-counting dimension of the gradient edge map."""
    g = luma(image)
    gy, gx = np.gradient(g)
    edges = (np.abs(gx) + np.abs(gy)) > EDGE_THRESHOLD
    if not edges.any():
        return 0.0
    counts = []
    sizes = []
    for size in BOX_SIZES:
        h = edges.shape[0] // size
        w = edges.shape[1] // size
        if h == 0 or w == 0:
            continue
        trimmed = edges[:h * size, :w * size]
        boxes = trimmed.reshape(h, size, w, size).any(axis=(1, 3))
        count = int(boxes.sum())
        if count > 0:
            counts.append(count)
            sizes.append(size)
    if len(counts) < 2:
        return 0.0
    slope, _ = np.polyfit(np.log(1.0 / np.asarray(sizes, dtype=np.float64)),
                          np.log(np.asarray(counts, dtype=np.float64)), 1)
    return float(slope)


def _glcm_features(image):
    q = (np.clip(np.rint(luma(image)), 0, 255).astype(np.int64)
         * GLCM_LEVELS) // 256
    feats = np.zeros(3)
    shifts = ((0, 1), (-1, 1), (-1, 0), (-1, -1))  # 0, 45, 90, 135 degrees
    for dy, dx in shifts:
        if dy < 0:
            a = q[-dy:, :]
            b = q[:dy, :]
        else:
            a, b = q, q
        if dx > 0:
            a = a[:, :-dx]
            b = b[:, dx:]
        elif dx < 0:
            a = a[:, -dx:]
            b = b[:, :dx]
        pairs = a.ravel() * GLCM_LEVELS + b.ravel()
        glcm = np.bincount(pairs, minlength=GLCM_LEVELS**2).astype(np.float64)
        glcm = glcm.reshape(GLCM_LEVELS, GLCM_LEVELS)
        glcm = glcm + glcm.T  # symmetric
        glcm /= glcm.sum()
        i = np.arange(GLCM_LEVELS)[:, None]
        j = np.arange(GLCM_LEVELS)[None, :]
        contrast = float((glcm * (i - j) ** 2).sum())
        homogeneity = float((glcm / (1.0 + np.abs(i - j))).sum())
        energy = float((glcm**2).sum())
        feats += np.array([contrast, homogeneity, energy])
    return feats / len(shifts)


def glcm_similarity(a, b):
    fa = _glcm_features(a)
    fb = _glcm_features(b)
    na, nb = np.linalg.norm(fa), np.linalg.norm(fb)
    if na == 0.0 or nb == 0.0:
        return 1.0 if np.array_equal(fa, fb) else 0.0
    return float(np.dot(fa, fb) / (na * nb))


class PerceptualPlugin:
    """File-exchange perceptual distance: command gets two image paths,
    prints one scalar on stdout."""

    def __init__(self, command, timeout=30.0):
        self.command = list(command)
        self.timeout = timeout

    def __call__(self, a, b):
        with tempfile.TemporaryDirectory(prefix="gaplab_perceptual_") as tmp:
            pa = os.path.join(tmp, "a.ppm")
            pb = os.path.join(tmp, "b.ppm")
            write_ppm(a, pa)
            write_ppm(b, pb)
            out = subprocess.run(self.command + [pa, pb], capture_output=True,
                                 text=True, timeout=self.timeout, check=True)
        return float(out.stdout.strip().split()[-1])


def image_battery(a, b, perceptual=None):
    """All metrics for one image pair; dimensions must match."""
    if (a.width, a.height) != (b.width, b.height):
        raise ValueError("image dimensions must match")
    return ImageMetricReport(
        correlation=correlation(a, b),
        histogram_intersection=histogram_intersection(a, b),
        lbp_similarity=lbp_similarity(a, b),
        psnr=psnr(a, b),
        ssim=ssim(a, b),
        nmi=nmi(a, b),
        fractal_dimension_delta=abs(fractal_dimension(a) - fractal_dimension(b)),
        kl_divergence=kl_divergence(a, b),
        mse=mse(a, b),
        glcm_similarity=glcm_similarity(a, b),
        wasserstein=wasserstein(a, b),
        perceptual_distance=perceptual(a, b) if perceptual is not None else None,
    )
