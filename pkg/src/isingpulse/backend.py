"""Kernel backend selection.

The compiled Cython kernels are used when the extension built; the
pure-Python twins take over otherwise.  Set ISINGPULSE_PURE_PYTHON=1 to force
the fallback (the benchmark uses this to compare the two).
"""

import os

if os.environ.get("ISINGPULSE_PURE_PYTHON"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels_cy as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

BACKEND = kernels.BACKEND_NAME
