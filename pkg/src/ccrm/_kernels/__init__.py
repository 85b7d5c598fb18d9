"""Hot kernels, compiled when available.

The Cython extension ``_core`` is used if it was built; otherwise the numpy
fallback is imported. Set ``CCRM_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"

if os.environ.get("CCRM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
else:
    _impl = _fallback

OK = _fallback.OK
NO_CONVERGENCE = _fallback.NO_CONVERGENCE
DEGENERATE = _fallback.DEGENERATE

ellipsoid_project = _impl.ellipsoid_project
circumcenter = _impl.circumcenter

__all__ = ["BACKEND", "OK", "NO_CONVERGENCE", "DEGENERATE",
           "ellipsoid_project", "circumcenter"]
