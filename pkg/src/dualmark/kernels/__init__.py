"""Hot numerical kernels: batched Haar pyramid and small-matrix Jacobi SVD.

The compiled extension is preferred; the NumPy fallback is used when it is
not built or when ``DUALMARK_PURE_PYTHON`` is set to a non-empty value other
than ``0``. ``BACKEND`` names the implementation in use.
"""
import os

from . import _pykernels

_force_py = os.environ.get("DUALMARK_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

haar_analysis = _impl.haar_analysis
haar_synthesis = _impl.haar_synthesis
svd_batch = _impl.svd_batch

__all__ = ["BACKEND", "haar_analysis", "haar_synthesis", "svd_batch"]
