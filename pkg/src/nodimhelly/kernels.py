"""Backend selection for the hot kernels.

The compiled extension ``_kernels`` is used when it imports; otherwise the
pure-Python module is used. Setting ``NODIM_PURE_PYTHON=1`` forces the
fallback.
"""
import os

from . import _kernels_py

STATUS_CONVERGED = _kernels_py.STATUS_CONVERGED
STATUS_MAXITER = _kernels_py.STATUS_MAXITER
STATUS_INFEASIBLE = _kernels_py.STATUS_INFEASIBLE

_compiled = None
if os.environ.get("NODIM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

backend = _compiled if _compiled is not None else _kernels_py
BACKEND = "cython" if _compiled is not None else "python"

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled


def get_backend(name=None):
    """Return the kernel module by name; ``None`` means the active one."""
    if name is None:
        return backend
    return BACKENDS[name]
