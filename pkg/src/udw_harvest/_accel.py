"""Backend selection for the quadrature kernels.

The numba kernel is used when numba imports cleanly; set UDW_HARVEST_NUMBA=0
to force the pure-numpy path (the benchmark script compares both).
"""

import os

from . import _kernels

_want_numba = os.environ.get("UDW_HARVEST_NUMBA", "1") != "0"

USING_NUMBA = False
eval_cells = _kernels.eval_cells_numpy

if _want_numba:
    try:
        eval_cells = _kernels._make_numba_kernel()
        USING_NUMBA = True
    except ImportError:  # pragma: no cover - exercised only without numba
        pass


def backend_name():
    return "numba" if USING_NUMBA else "numpy"
