"""Search kernels: open-path hunting and ground truth-table sweeps.

Two interchangeable backends live here: a compiled Cython extension
(``_speedups``) and a pure-Python twin (``pure``).  The compiled one is
selected at import when available; set ``CONNKIT_PURE_KERNEL=1`` to force
the pure backend.  ``bench/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

from . import pure

if os.environ.get("CONNKIT_PURE_KERNEL"):
    _backend = pure
else:
    try:
        from . import _speedups as _backend  # type: ignore[no-redef]
    except ImportError:
        _backend = pure

find_open_path = _backend.find_open_path
ground_unsat = _backend.ground_unsat

BACKEND = "compiled" if _backend is not pure else "pure"


def backend_name() -> str:
    return BACKEND
