"""Pseudo-real sensor corruption and the deterministic noise streams.

The noise field is a pure function of (master seed, stream, frame index)
and deliberately independent of the testing modality: the pseudo-real
world is one frozen "reality" per seed, and every modality that touches
a real sensor stream sees the same realization at the same frame. This
is what lets mixed-reality frames share the real background of the
pseudo-real reference frames.
"""

import numpy as np

from gaplab.sensing.types import DepthImage, RGBImage

STREAM_RGB = 1
STREAM_DEPTH = 2
STREAM_CAMPAIGN = 3


def noise_rng(master_seed, stream, index):
    """Counter-style generator keyed by (seed, stream, frame index)."""
    seq = np.random.SeedSequence((int(master_seed), int(stream), int(index)))
    return np.random.Generator(np.random.Philox(seq))


def apply_rgb_noise(image, gap, rng):
    """Additive per-channel Gaussian plus exposure offset, clamped to uint8."""
    if gap.rgb_sigma == 0.0 and gap.exposure_offset == 0.0:
        return RGBImage(image.data.copy())
    arr = image.data.astype(np.float64)
    if gap.rgb_sigma > 0.0:
        arr = arr + rng.normal(0.0, gap.rgb_sigma, size=arr.shape)
    arr = arr + gap.exposure_offset
    return RGBImage(np.clip(np.rint(arr), 0, 255).astype(np.uint8))


def apply_depth_noise(depth, gap, rng):
    """Gaussian on valid pixels plus Bernoulli dropout to the sentinel."""
    if gap.depth_sigma == 0.0 and gap.depth_dropout == 0.0:
        return DepthImage(depth.data.copy(), max_range=depth.max_range)
    arr = depth.data.astype(np.float64)
    valid = arr <= depth.max_range
    if gap.depth_sigma > 0.0:
        jitter = rng.normal(0.0, gap.depth_sigma, size=arr.shape)
        arr = np.where(valid, np.clip(arr + jitter, 0.0, depth.max_range), arr)
    if gap.depth_dropout > 0.0:
        drop = rng.random(size=arr.shape) < gap.depth_dropout
        arr = np.where(valid & drop, float(depth.sentinel), arr)
    return DepthImage(arr.astype(np.float32), max_range=depth.max_range)


def apply_sensor_noise(frame, gap, rng):
    """Dispatch on frame type; zero-profile input is returned bit-exact."""
    if isinstance(frame, RGBImage):
        return apply_rgb_noise(frame, gap, rng)
    if isinstance(frame, DepthImage):
        return apply_depth_noise(frame, gap, rng)
    raise TypeError(f"cannot apply sensor noise to {type(frame).__name__}")
