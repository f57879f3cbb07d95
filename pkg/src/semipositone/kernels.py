"""Backend selection for the element kernels.

The compiled extension is used when it imports; ``SEMIPOSITONE_PURE_PYTHON=1``
forces the numpy fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SEMIPOSITONE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py

kinetic = _impl.kinetic
potential_power = _impl.potential_power

# shared helpers; not performance critical
GAUSS_XI = _kernels_py.GAUSS_XI
quad_values = _kernels_py.quad_values
scatter = _kernels_py.scatter


def backends():
    """Mapping name -> kernel module for every importable backend."""
    out = {"python": _kernels_py}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
