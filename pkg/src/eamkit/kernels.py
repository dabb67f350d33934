"""Backend selection for the bitmask kernels.

The compiled extension is used when it has been built; otherwise the numpy
fallback is imported. Set ``EAMKIT_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("EAMKIT_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_py as _impl
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _impl
        BACKEND = "python"

pair_list = _impl.pair_list
cut_sums = _impl.cut_sums
predict_all = _impl.predict_all
schmidt_indices = _impl.schmidt_indices
sector_states = _impl.sector_states
xxz_sector = _impl.xxz_sector
fermion_signs = _impl.fermion_signs

__all__ = [
    "BACKEND",
    "pair_list",
    "cut_sums",
    "predict_all",
    "schmidt_indices",
    "sector_states",
    "xxz_sector",
    "fermion_signs",
]
