"""Select the compiled kernels when present, else the pure-Python ones.

Set ``SBS_TRANSDUCTION_PURE=1`` to force the fallback.
"""

import os

from . import _kernels_py as pure

compiled = None
if not os.environ.get("SBS_TRANSDUCTION_PURE"):
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None

impl = compiled if compiled is not None else pure
BACKEND = "cython" if compiled is not None else "python"

march_envelopes = impl.march_envelopes
green_recursion = impl.green_recursion
upwind_run = impl.upwind_run
rk4_rlc = impl.rk4_rlc


def backends():
    """Mapping of available backend name -> module (for cross-checks and benchmarks)."""
    out = {"python": pure}
    if compiled is not None:
        out["cython"] = compiled
    return out
