"""Per-point distance statistics between corresponding point clouds."""

from dataclasses import dataclass

import numpy as np


class EmptyCorrespondenceError(ValueError):
    pass


@dataclass(frozen=True)
class CloudDistanceStats:
    mean: float
    max: float
    std: float
    matched_count: int
    skipped_count: int


def cloud_stats(a, b):
    """Euclidean distance statistics over matched points.

    Correspondence is by pixel origin when both clouds carry pixel
    indices (clouds reprojected from aligned depth frames); otherwise
    equal-length clouds match positionally. Unmatched points are
    skipped and counted.
    """
    if a.pixel_indices is not None and b.pixel_indices is not None:
        common, ia, ib = np.intersect1d(a.pixel_indices, b.pixel_indices,
                                        return_indices=True)
        pa = a.points[ia]
        pb = b.points[ib]
        skipped = (len(a) - len(common)) + (len(b) - len(common))
    else:
        if len(a) != len(b):
            raise ValueError("clouds without pixel indices must have equal size")
        pa, pb = a.points, b.points
        skipped = 0
    if pa.shape[0] == 0:
        raise EmptyCorrespondenceError("no corresponding points between clouds")
    d = np.sqrt(((pa - pb) ** 2).sum(axis=1))
    return CloudDistanceStats(mean=float(d.mean()), max=float(d.max()),
                              std=float(d.std()), matched_count=int(d.size),
                              skipped_count=int(skipped))
