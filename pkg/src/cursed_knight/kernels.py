"""Oracle kernels, compiled when available.

The compiled extension is used when it imports; otherwise the numpy
versions take over. Setting ``CURSED_KNIGHT_PURE=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("CURSED_KNIGHT_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

tally_wins = _impl.tally_wins
interp_rows = _impl.interp_rows
min_monotone_linear = _impl.min_monotone_linear
