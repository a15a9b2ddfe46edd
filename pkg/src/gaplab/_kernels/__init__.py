"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy fallback
is used otherwise. Set GAPLAB_KERNELS=python or =native to force one.
"""

import os

_requested = os.environ.get("GAPLAB_KERNELS", "auto")

if _requested == "python":
    from . import _fallback as _impl

    BACKEND = "python"
elif _requested == "native":
    from . import _native as _impl  # type: ignore[no-redef]

    BACKEND = "native"
else:
    try:
        from . import _native as _impl  # type: ignore[no-redef]

        BACKEND = "native"
    except ImportError:
        from . import _fallback as _impl  # type: ignore[no-redef]

        BACKEND = "python"

frechet_dp = _impl.frechet_dp
dbscan_labels = _impl.dbscan_labels
raycast_boxes = _impl.raycast_boxes

__all__ = ["BACKEND", "frechet_dp", "dbscan_labels", "raycast_boxes"]
