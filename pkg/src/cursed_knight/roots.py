"""Bracketing root finders for monotone one-dimensional problems."""

from __future__ import annotations

from typing import Callable

XTOL = 1e-12
MAX_ITER = 200


class ConvergenceError(RuntimeError):
    """Raised when a bracketing search cannot reach the requested tolerance."""


def first_crossing(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = XTOL,
    max_iter: int = MAX_ITER,
) -> float:
    """Locate ``inf {x in [lo, hi] : func(x) >= 0}`` for a nondecreasing ``func``.

    The search tolerates flat stretches and jumps, so it returns the
    generalized crossing point rather than requiring a sign change with a
    continuous root. If ``func(lo) >= 0`` the answer is ``lo``; if
    ``func(hi) < 0`` there is no crossing and ``hi`` is returned.

    Parameters
    ----------
    func : callable
        Nondecreasing scalar function.
    lo, hi : float
        Bracket.
    xtol : float
        Width of the final bracket.
    max_iter : int
        Iteration cap.

    Returns
    -------
    float
        Right end of the final bracket.
    """
    if func(lo) >= 0.0:
        return lo
    if func(hi) < 0.0:
        return hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if func(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= xtol:
            return hi
    if hi - lo > xtol:
        raise ConvergenceError(f"bracket [{lo}, {hi}] wider than {xtol}")
    return hi


def decreasing_root(
    func: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = XTOL,
    max_iter: int = MAX_ITER,
) -> float:
    """Root of a nonincreasing ``func`` on ``[lo, hi]`` by bisection."""
    return first_crossing(lambda x: -func(x), lo, hi, xtol, max_iter)
