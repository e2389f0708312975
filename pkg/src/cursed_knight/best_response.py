"""Best-response thresholds against a cut-off opponent.

Every concept in this game has a cut-off best response. Closed forms are
used where they exist; otherwise the threshold is the crossing point of a
monotone indifference function found by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bands import DistributionBand
from .roots import decreasing_root, first_crossing
from .valuation import CONCEPTS, CutoffStrategy


@dataclass(frozen=True)
class BestResponseQuery:
    concept: str
    opponent: CutoffStrategy
    band: DistributionBand
    chi: float = 0.0

    def __post_init__(self):
        if self.concept not in CONCEPTS:
            raise ValueError(f"unknown concept {self.concept!r}")
        if not 0.0 <= self.chi <= 1.0:
            raise ValueError("chi must lie in [0, 1]")


def _degenerate() -> CutoffStrategy:
    return CutoffStrategy(0.0, degenerate=True)


def sum_inverse(band: DistributionBand, target: float) -> float:
    """``inf {theta : F_l(theta) + F_h(theta) >= target}``."""
    lo, hi = band.lower, band.upper
    return first_crossing(lambda t: lo(t) + hi(t) - target, 0.0, 1.0)


def br_rational(theta_hat: float, band: DistributionBand) -> CutoffStrategy:
    """Trade iff ``F(theta) <= F(theta_hat) / 2`` under the center."""
    if theta_hat <= 0.0:
        return _degenerate()
    f = band.center
    return CutoffStrategy(f.inverse(0.5 * f(theta_hat)))


def br_cursed(theta_hat: float, band: DistributionBand) -> CutoffStrategy:
    """The center's median whenever the opponent trades with positive probability."""
    if theta_hat <= 0.0:
        return _degenerate()
    return CutoffStrategy(band.center.inverse(0.5))


def br_partial(chi: float, theta_hat: float, band: DistributionBand) -> CutoffStrategy:
    """Best response of a player who is cursed with weight ``chi``.

    Parameters
    ----------
    chi : float
        Degree of cursedness in [0, 1].
    theta_hat : float
        Opponent's threshold.
    band : DistributionBand
        Only the center is used.
    """
    if not 0.0 <= chi <= 1.0:
        raise ValueError("chi must lie in [0, 1]")
    if theta_hat <= 0.0:
        return _degenerate()
    f = band.center
    p = f(theta_hat)
    q = p / (2.0 * (1.0 - chi + chi * p))
    if chi > 0.5:
        q = max(q, (2.0 * chi - 1.0) / (2.0 * chi))
    return CutoffStrategy(f.inverse(min(q, 1.0)))


def br_maxmin_rational(theta_hat: float, band: DistributionBand) -> CutoffStrategy:
    """``(F_l + F_h)^-1(F_l(theta_hat))``; strictly undercuts the opponent."""
    band.require_normalized()
    if theta_hat <= 0.0:
        return _degenerate()
    return CutoffStrategy(sum_inverse(band, band.lower.left_limit(theta_hat)))


def br_maxmin_cursed_under_Fstar(theta_hat: float, band: DistributionBand) -> CutoffStrategy:
    """Cursed maxmin best response with the average strategy fixed at ``F*(theta_hat)``."""
    band.require_normalized()
    if theta_hat <= 0.0:
        return _degenerate()
    s = band.center(theta_hat)
    if s <= 0.5:
        return CutoffStrategy(band.lower_median)
    lo, hi = band.lower, band.upper
    # no-trade minus trade value, increasing in theta because 1 - 2s < 0
    gap = lambda t: lo(t) - (1.0 - 2.0 * s) * hi(t) - s  # noqa: E731
    return CutoffStrategy(first_crossing(gap, band.upper_median, 1.0))


def ambiguous_indifference(theta: float, theta_hat: float, band: DistributionBand) -> float:
    """``F_h(t) + F_h(c) - 2 F_h(t) F_h(c) - F_l(t)``; strictly decreasing in ``t`` once ``F_h(c) >= 1/2``."""
    hi = band.upper
    a, b = hi(theta), hi(theta_hat)
    return a + b - 2.0 * a * b - band.lower(theta)


def br_ambiguous_cursed(theta_hat: float, band: DistributionBand) -> CutoffStrategy:
    """Cursed maxmin best response when the average strategy is also ambiguous.

    Below ``F_h^-1(1/2)`` the answer is ``F_l^-1(1/2)``. From there on the
    threshold is the root of ``ambiguous_indifference`` inside
    ``[F_h^-1(1/2), F_l^-1(1/2)]``, located by bisection on its sign.

    When ``F_l(theta_hat) = 0`` some band member has the opponent never
    trading, so trade at best ties with no-trade. The same threshold is
    returned, flagged as degenerate: it is the largest optimal one.
    """
    band.require_normalized()
    if theta_hat <= 0.0:
        return _degenerate()
    tied = band.lower(theta_hat) <= 0.0
    m_lo, m_hi = band.upper_median, band.lower_median
    if band.upper(theta_hat) < 0.5 or m_hi - m_lo <= 0.0:
        return CutoffStrategy(m_hi, degenerate=tied)
    w = lambda t: ambiguous_indifference(t, theta_hat, band)  # noqa: E731
    return CutoffStrategy(decreasing_root(w, m_lo, m_hi), degenerate=tied)


def best_response(query: BestResponseQuery) -> CutoffStrategy:
    """Dispatch on ``query.concept``."""
    c = query.opponent.threshold
    b = query.band
    if query.concept == "rational":
        return br_rational(c, b)
    if query.concept == "cursed":
        return br_cursed(c, b)
    if query.concept == "maxmin-rational":
        return br_maxmin_rational(c, b)
    if query.concept == "maxmin-cursed-under-Fstar":
        return br_maxmin_cursed_under_Fstar(c, b)
    if query.concept == "ambiguous-cursed":
        return br_ambiguous_cursed(c, b)
    return br_partial(query.chi, c, b)
