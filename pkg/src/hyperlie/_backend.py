"""Pick the integration kernel at import time.

The compiled ``_nahm_kernel`` is used when it imports; set
``HYPERLIE_PURE_PYTHON=1`` to force the pure-Python fallback.
"""
import os

from . import _nahm_py

try:
    from . import _nahm_kernel as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and os.environ.get("HYPERLIE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    kernel = _compiled
    BACKEND = "cython"
else:
    kernel = _nahm_py
    BACKEND = "python"


def available():
    """Names of the kernels importable in this installation."""
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def get(name):
    if name == "python":
        return _nahm_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel hyperlie._nahm_kernel is not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
