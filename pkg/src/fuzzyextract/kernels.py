"""Kernel selection: compiled extension when importable, pure Python otherwise.

Set FUZZYEXTRACT_PURE=1 to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
if os.environ.get("FUZZYEXTRACT_PURE") != "1":
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
else:
    _impl = _pykernels

levenshtein = _impl.levenshtein
fed_dp = _impl.fed_dp
count_filter = _impl.count_filter

__all__ = ["BACKEND", "count_filter", "fed_dp", "levenshtein"]
