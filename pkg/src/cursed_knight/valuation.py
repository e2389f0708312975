"""Interim expected utilities of trading and not trading against a cut-off opponent.

A player of type ``theta`` faces an opponent who offers to trade iff their
type is at most ``cutoff``. Each functional returns the value of the chosen
action. Functions ending in ``_values`` are vectorized over ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bands import DistributionBand

TRADE = "trade"
NO_TRADE = "no-trade"
ACTIONS = (TRADE, NO_TRADE)

CONCEPTS = (
    "rational",
    "cursed",
    "maxmin-rational",
    "maxmin-cursed-under-Fstar",
    "ambiguous-cursed",
    "partial",
)
CURSED_CONCEPTS = ("cursed", "maxmin-cursed-under-Fstar", "ambiguous-cursed", "partial")
_MAXMIN = ("maxmin-rational", "maxmin-cursed-under-Fstar", "ambiguous-cursed")


@dataclass(frozen=True)
class CutoffStrategy:
    """Trade iff own type is at most ``threshold``.

    ``degenerate`` marks a best response that is not unique: against an
    opponent who never trades every strategy is optimal and threshold 0 is
    reported; when trade only ties with no-trade below the threshold, the
    largest optimal threshold is reported.
    """

    threshold: float
    degenerate: bool = False

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold}")


@dataclass(frozen=True)
class ValueQuery:
    own_type: float
    action: str
    opponent: CutoffStrategy
    band: DistributionBand
    chi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.own_type <= 1.0:
            raise ValueError("own_type must lie in [0, 1]")
        if self.action not in ACTIONS:
            raise ValueError(f"action must be one of {ACTIONS}")
        if not 0.0 <= self.chi <= 1.0:
            raise ValueError("chi must lie in [0, 1]")


def _theta(theta) -> np.ndarray:
    return np.asarray(theta, dtype=float)


def _ret(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


# -- trade values, vectorized over own type -----------------------------------

def rational_trade_values(theta, cutoff: float, band: DistributionBand):
    """``|F(theta) - F(cutoff)|`` under the center."""
    f = band.center
    return _ret(np.abs(f(_theta(theta)) - f(cutoff)), theta)


def cursed_trade_values(theta, cutoff: float, band: DistributionBand):
    """``s (1 - F(theta)) + (1 - s) F(theta)`` with ``s = F(cutoff)``."""
    f = band.center
    s = f(cutoff)
    x = f(_theta(theta))
    return _ret(s * (1.0 - x) + (1.0 - s) * x, theta)


def maxmin_rational_trade_values(theta, cutoff: float, band: DistributionBand):
    """Worst case over the band of the rational trade value.

    Equals ``F_l(cutoff) - F_h(theta)`` when that is positive,
    ``F_l(theta) - F_h(cutoff)`` when that is positive, and 0 otherwise.
    """
    t = _theta(theta)
    below = band.lower.left_limit(cutoff) - band.upper(t)
    above = band.lower(t) - band.upper(cutoff)
    return _ret(np.maximum(0.0, np.maximum(below, above)), theta)


def maxmin_cursed_trade_values(theta, cutoff: float, band: DistributionBand):
    """Worst case of the cursed trade value with the average strategy fixed by the center."""
    s = band.center(cutoff)
    t = _theta(theta)
    coef = 1.0 - 2.0 * s
    envelope = band.lower(t) if coef >= 0 else band.upper(t)
    return _ret(coef * envelope + s, theta)


def _bilinear_polygon_min(xl, xh, yl, yh, rel):
    """Minimum of ``x + y - 2xy`` over the box with an order constraint.

    ``rel < 0`` imposes ``x <= y``, ``rel > 0`` imposes ``x >= y`` and
    ``rel == 0`` imposes ``x == y``. The function is bilinear, so its minimum
    over the polygon sits at a vertex: a feasible box corner or an end of
    the diagonal segment inside the box.
    """
    tol = 1e-15
    f = lambda x, y: x + y - 2.0 * x * y  # noqa: E731
    best = np.full(np.broadcast(xl, yl, rel).shape, np.inf)
    for x, y in ((xl, yl), (xl, yh), (xh, yl), (xh, yh)):
        ok = ((rel < 0) & (x <= y + tol)) | ((rel > 0) & (x + tol >= y))
        best = np.where(ok, np.minimum(best, f(x, y)), best)
    dl = np.maximum(xl, yl)
    dh = np.minimum(xh, yh)
    ok = dl <= dh + tol
    best = np.where(ok, np.minimum(best, np.minimum(f(dl, dl), f(dh, dh))), best)
    return best


def ambiguous_trade_values(theta, cutoff: float, band: DistributionBand):
    """Worst case over the band of ``F(theta) + F(c) - 2 F(theta) F(c)``.

    One distribution drives both the own-type quantile and the opponent's
    trade probability, so the pair ``(F(theta), F(c))`` ranges over the
    envelope box cut by the ordering implied by ``theta`` versus ``c``.
    """
    t = _theta(theta)
    xl, xh = band.lower(t), band.upper(t)
    yl, yh = band.lower.left_limit(cutoff), band.upper(cutoff)
    rel = np.sign(t - cutoff)
    return _ret(_bilinear_polygon_min(xl, xh, yl, yh, rel), theta)


def partial_trade_values(theta, cutoff: float, band: DistributionBand, chi: float):
    """``chi`` times the cursed value plus ``1 - chi`` times the rational value."""
    return _ret(
        chi * _theta(cursed_trade_values(theta, cutoff, band))
        + (1.0 - chi) * _theta(rational_trade_values(theta, cutoff, band)),
        theta,
    )


def _check_concept(concept: str, band: DistributionBand) -> None:
    if concept not in CONCEPTS:
        raise ValueError(f"unknown concept {concept!r}; expected one of {CONCEPTS}")
    if concept in _MAXMIN:
        band.require_normalized()


def trade_values(concept: str, theta, cutoff: float, band: DistributionBand, chi: float = 0.0):
    """Trade value under ``concept`` for one or many own types."""
    _check_concept(concept, band)
    if concept == "rational":
        return rational_trade_values(theta, cutoff, band)
    if concept == "cursed":
        return cursed_trade_values(theta, cutoff, band)
    if concept == "maxmin-rational":
        return maxmin_rational_trade_values(theta, cutoff, band)
    if concept == "maxmin-cursed-under-Fstar":
        return maxmin_cursed_trade_values(theta, cutoff, band)
    if concept == "ambiguous-cursed":
        return ambiguous_trade_values(theta, cutoff, band)
    return partial_trade_values(theta, cutoff, band, chi)


def no_trade_values(concept: str, theta, band: DistributionBand):
    """Value of keeping one's own good: the (worst-case) probability of the higher type."""
    _check_concept(concept, band)
    curve = band.lower if concept in _MAXMIN else band.center
    return curve(theta)


def action_value(concept: str, q: ValueQuery) -> float:
    if q.action == TRADE:
        return trade_values(concept, q.own_type, q.opponent.threshold, q.band, q.chi)
    return no_trade_values(concept, q.own_type, q.band)


def value_rational(q: ValueQuery) -> float:
    """Expected utility under the center with correct type-contingent beliefs."""
    return action_value("rational", q)


def value_cursed(q: ValueQuery) -> float:
    """Expected utility when the opponent's action is believed independent of their type."""
    return action_value("cursed", q)


def value_maxmin_rational(q: ValueQuery) -> float:
    """Infimum of the rational value over the band."""
    return action_value("maxmin-rational", q)


def value_maxmin_cursed_under_Fstar(q: ValueQuery) -> float:
    """Infimum of the cursed value over the band, average strategy fixed by the center."""
    return action_value("maxmin-cursed-under-Fstar", q)


def value_ambiguous_cursed(q: ValueQuery) -> float:
    """Infimum of the cursed value over the band, average strategy included."""
    return action_value("ambiguous-cursed", q)


def value_partial_cursed(q: ValueQuery) -> float:
    """Convex blend of cursed and rational values with weight ``q.chi``."""
    return action_value("partial", q)
