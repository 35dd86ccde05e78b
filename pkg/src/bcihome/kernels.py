"""Backend selection for the hot loops.

The compiled extension is used when importable; set ``BCIHOME_PURE_PYTHON=1``
to force the fallback. ``BACKEND`` names the active implementation.
"""

import os

from . import _fallback

fallback = _fallback

try:
    if os.environ.get("BCIHOME_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels as compiled
except ImportError:
    compiled = None

_active = compiled if compiled is not None else fallback
BACKEND = "cython" if compiled is not None else "python"

autocorr_biased = _active.autocorr_biased
lfilter = _active.lfilter
above_runs = _active.above_runs
