"""Pure numpy implementations of the oracle kernels.

Signatures and results match the compiled module ``_kernels`` exactly.
"""

from __future__ import annotations

import numpy as np


def tally_wins(theta1, theta2, trade1, trade2) -> int:
    """Count games won by player 1.

    Player 1 wins when both trade and holds the lower type, or when at
    least one refuses and player 1 holds the higher type.
    """
    t1 = np.asarray(theta1, dtype=np.float64)
    t2 = np.asarray(theta2, dtype=np.float64)
    both = np.asarray(trade1, dtype=bool) & np.asarray(trade2, dtype=bool)
    win = np.where(both, t1 < t2, t1 > t2)
    return int(np.count_nonzero(win))


def interp_rows(x, y, t):
    """Evaluate row-wise piecewise-linear functions.

    Parameters
    ----------
    x, y : ndarray, shape (S, K)
        Knots of ``S`` functions; each row of ``x`` is increasing.
    t : ndarray, shape (S, M)
        Evaluation points per row.

    Returns
    -------
    ndarray, shape (S, M)
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    s, k = x.shape
    # shift each row into its own unit interval so one searchsorted covers all rows
    offset = np.arange(s, dtype=np.float64)[:, None] * 4.0
    flat_x = (x + offset).ravel()
    flat_t = (np.clip(t, x[:, :1], x[:, -1:]) + offset).ravel()
    idx = np.searchsorted(flat_x, flat_t, side="right").reshape(t.shape)
    row_base = (np.arange(s) * k)[:, None]
    idx = np.clip(idx - row_base, 1, k - 1) + row_base
    fx, fy = x.ravel(), y.ravel()
    x0, x1 = fx[idx - 1], fx[idx]
    y0, y1 = fy[idx - 1], fy[idx]
    width = x1 - x0
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(width > 0, (np.clip(t, x0, x1) - x0) / width, 1.0)
    return y0 + w * (y1 - y0)


def min_monotone_linear(coef, lo, hi) -> float:
    """Minimum of ``sum(coef * y)`` over nondecreasing ``y`` with ``lo <= y <= hi``.

    The optimum of this linear program sits at a vertex where every
    coordinate equals one of the bound values, so a dynamic program over the
    sorted bound values is exact. Returns ``inf`` when infeasible.
    """
    coef = np.asarray(coef, dtype=np.float64)
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    if coef.size == 0:
        return 0.0
    vals = np.unique(np.concatenate([lo, hi]))
    best = np.where((vals >= lo[0]) & (vals <= hi[0]), coef[0] * vals, np.inf)
    for k in range(1, coef.size):
        reach = np.minimum.accumulate(best)
        best = np.where((vals >= lo[k]) & (vals <= hi[k]), coef[k] * vals + reach, np.inf)
    return float(best.min())
