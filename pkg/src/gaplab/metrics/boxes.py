"""Axis-aligned pixel bounding boxes and IoU."""

import warnings

import numpy as np


def bbox_from_mask(mask):
    """Tight (x0, y0, x1, y1) box around the true pixels, or None."""
    jj, ii = np.nonzero(mask)
    if ii.size == 0:
        return None
    return (int(ii.min()), int(jj.min()), int(ii.max()) + 1, int(jj.max()) + 1)


def iou(box_a, box_b):
    """Intersection over union of two (x0, y0, x1, y1) boxes."""
    ax0, ay0, ax1, ay1 = box_a
    bx0, by0, bx1, by1 = box_b
    if ax1 < ax0 or ay1 < ay0 or bx1 < bx0 or by1 < by0:
        raise ValueError("boxes must satisfy min <= max")
    area_a = (ax1 - ax0) * (ay1 - ay0)
    area_b = (bx1 - bx0) * (by1 - by0)
    if area_a == 0 or area_b == 0:
        warnings.warn("zero-area box in IoU", stacklevel=2)
        return 0.0
    ix = max(0.0, min(ax1, bx1) - max(ax0, bx0))
    iy = max(0.0, min(ay1, by1) - max(ay0, by0))
    inter = ix * iy
    union = area_a + area_b - inter
    return float(inter / union)
