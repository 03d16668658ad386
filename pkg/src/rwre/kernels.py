"""Kernel backend selection: compiled extension if available, else Python.

Set ``RWRE_PURE_PYTHON=1`` to force the fallback.  Both backends consume
random streams identically, so simulated paths do not depend on the choice;
only speed does (see ``benchmarks/bench_kernels.py``).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("RWRE_PURE_PYTHON") == "1":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND

OK = _kernels_py.OK
CAPPED = _kernels_py.CAPPED
LEFT_EXHAUSTED = _kernels_py.LEFT_EXHAUSTED

walk_hit = _impl.walk_hit
walk_fixed = _impl.walk_fixed
walk_coupled = _impl.walk_coupled
w_forward = _impl.w_forward
wv_forward = _impl.wv_forward
ladder_scan = _impl.ladder_scan
block_local_sums = _impl.block_local_sums
block_stats = _impl.block_stats
localization_expectations = _impl.localization_expectations
