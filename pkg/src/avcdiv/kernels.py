"""Backend selection for the numerical kernels.

The compiled extension is used when it has been built; otherwise the
pure-Python twin is imported.  Setting ``AVCDIV_PURE_PYTHON=1`` forces the
fallback (the benchmark and the parity tests use this).
"""
from __future__ import annotations

import os

if os.environ.get("AVCDIV_PURE_PYTHON", "") not in ("", "0"):
    from ._kernels_py import *  # noqa: F401,F403
    from ._kernels_py import BACKEND
else:
    try:
        from ._kernels import *  # noqa: F401,F403
        from ._kernels import BACKEND
    except ImportError:
        from ._kernels_py import *  # noqa: F401,F403
        from ._kernels_py import BACKEND

__all__ = [
    "BACKEND",
    "mutual_information",
    "binary_capacity",
    "minimax_two_state",
    "min_over_theta",
    "blahut_arimoto",
    "ml_decode",
]
