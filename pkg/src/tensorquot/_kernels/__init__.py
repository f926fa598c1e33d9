"""Kernel selection.

The compiled module is used when it was built and importable; setting
``TENSORQUOT_PURE_PYTHON=1`` forces the pure-Python fallback.
"""
import os

from tensorquot._kernels import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("TENSORQUOT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from tensorquot._kernels import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels

mul_terms = _impl.mul_terms
divide_terms = _impl.divide_terms
cyc_mulmod = _impl.cyc_mulmod

__all__ = ["BACKEND", "mul_terms", "divide_terms", "cyc_mulmod"]
