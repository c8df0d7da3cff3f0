"""Selects the compiled kernel module when available.

Set ``EDGESERVE_SIM_PURE=1`` to force the pure-Python implementation.
"""

import os

from . import _pykernels

try:
    if os.environ.get("EDGESERVE_SIM_PURE", "") not in ("", "0"):
        raise ImportError("pure-Python kernels requested")
    from . import _ckernels as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

EXPONENTIAL = _pykernels.EXPONENTIAL
LINEAR = _pykernels.LINEAR
STEP = _pykernels.STEP

context_sum = _impl.context_sum
utility = _impl.utility


def backend(name):
    """Kernel module by name ("cython" or "python"); for tests and benchmarks."""
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
