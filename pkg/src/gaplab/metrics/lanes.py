"""Lane overlay alignment: spline fit through anchors, 100-point distance."""

import numpy as np

from gaplab.geometry import Spline, catmull_rom_eval

SAMPLES = 100


def _padded_spline(anchors):
    pts = [(float(x), float(y)) for x, y in anchors]
    if len(pts) < 4:
        raise ValueError("need at least 4 anchor points for a spline fit")
    first = (2 * pts[0][0] - pts[1][0], 2 * pts[0][1] - pts[1][1])
    last = (2 * pts[-1][0] - pts[-2][0], 2 * pts[-1][1] - pts[-2][1])
    return Spline([first] + pts + [last], closed=False)


def sample_lane_spline(anchors, samples=SAMPLES):
    """Catmull-Rom fit through the anchors, sampled at equal parameter steps."""
    spline = _padded_spline(anchors)
    segs = spline.num_segments
    out = np.empty((samples, 2))
    for k in range(samples):
        u = k / (samples - 1) * segs
        seg = min(int(u), segs - 1)
        out[k] = catmull_rom_eval(spline, seg, u - seg)
    return out


def lane_alignment(real_anchors, mixed_anchors, samples=SAMPLES):
    """Mean pixel distance between the two fitted lane splines."""
    a = sample_lane_spline(real_anchors, samples)
    b = sample_lane_spline(mixed_anchors, samples)
    return float(np.hypot(a[:, 0] - b[:, 0], a[:, 1] - b[:, 1]).mean())
