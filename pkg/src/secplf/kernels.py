"""Kernel backend selection.

Prefers the compiled ``_kernels`` extension; falls back to the numpy
implementation when it is missing or ``SECPLF_PURE_PYTHON`` is set.
"""

from __future__ import annotations

import os

from . import _kernels_py as python_backend

BACKEND = "python"
compiled_backend = None

if os.environ.get("SECPLF_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernels as compiled_backend  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend

window_min = _impl.window_min
max_delta = _impl.max_delta
count_within = _impl.count_within
exceedance_lags = _impl.exceedance_lags
