"""Pick the compiled kernels when available, else the pure-Python ones.

Set ``CRABDETECT_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

BACKENDS = {"python": _pykernels}

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
else:
    BACKENDS["cython"] = _ckernels

if _ckernels is not None and os.environ.get("CRABDETECT_PURE_PYTHON", "") in ("", "0"):
    BACKEND = "cython"
else:
    BACKEND = "python"

_impl = BACKENDS[BACKEND]
label_components = _impl.label_components
trace_boundary = _impl.trace_boundary
