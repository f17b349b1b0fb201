"""Backend selection for the oracle hot loops.

The compiled extension ``sphquant._kernels`` is used when it imports; the
numpy module ``sphquant._kernels_py`` is the fallback.  Setting the
environment variable ``SPHQUANT_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("SPHQUANT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = _impl.BACKEND
segment_costs = _impl.segment_costs
cyclic_partition = _impl.cyclic_partition
subset_costs = _impl.subset_costs
minimize_representative = _impl.minimize_representative

HULL_SAMPLES = _kernels_py.HULL_SAMPLES
CIRCLE_SAMPLES = _kernels_py.CIRCLE_SAMPLES
EXHAUSTIVE_SAMPLES = _kernels_py.EXHAUSTIVE_SAMPLES
TERNARY_TOL = _kernels_py.TERNARY_TOL


def available_backends():
    """Map backend name to kernel module for every importable backend."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["cython"] = _kernels
    return out
