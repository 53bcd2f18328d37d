"""Kernel backend selection.

Imports the compiled extension when available; falls back to the pure-Python
implementation otherwise. Set COPLAN_PURE_PYTHON=1 to force the fallback
(used by the tests and the backend benchmark).
"""

import os

if os.environ.get("COPLAN_PURE_PYTHON") == "1":
    from coplan import _kernels_py as _backend

    BACKEND = "python"
else:
    try:
        from coplan import _kernels_c as _backend  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from coplan import _kernels_py as _backend

        BACKEND = "python"

chain_points = _backend.chain_points
point_seg = _backend.point_seg
seg_seg = _backend.seg_seg
poly_point = _backend.poly_point
poly_seg = _backend.poly_seg
poly_poly = _backend.poly_poly
