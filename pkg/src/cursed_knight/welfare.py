"""Actual and perceived ex-ante utilities in partially cursed equilibria.

Types are uniform on the quantile scale, so every quantity below depends on
the equilibrium trade probabilities only and is invariant under the quantile
transform of a non-uniform center.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .equilibria import partial_thresholds

FD_STEP = 1e-4


@dataclass(frozen=True)
class WelfareReport:
    chi1: float
    chi2: float
    U1: float
    U2: float
    V1: float
    V2: float
    thresholds: tuple[float, float]

    @property
    def trivial(self) -> bool:
        return self.thresholds == (0.0, 0.0)


def _thresholds(chi1: float, chi2: float) -> tuple[float, float]:
    probs = partial_thresholds(chi1, chi2)
    return (0.0, 0.0) if probs is None else probs


def actual_utility(chi1: float, chi2: float) -> tuple[float, float]:
    """Ex-ante winning probabilities ``(U1, U2)`` in the equilibrium for ``(chi1, chi2)``.

    Trade happens when both types fall below their thresholds, and then the
    lower type wins; otherwise the higher type wins.
    """
    p1, p2 = _thresholds(chi1, chi2)
    if chi1 <= chi2:
        u1 = p1 * (p2 - p1) + 0.5
    else:
        u1 = p2 * (p2 - p1) + 0.5
    return u1, 1.0 - u1


def _perceived_first(chi1: float, chi2: float) -> float:
    if max(chi1, chi2) <= 0.5:
        return 0.5
    if chi1 <= chi2:
        return (1.0 - 4.0 * (1.0 + chi1 - 3.0 * chi2) * chi2) / (8.0 * (2.0 * chi2 - chi1) * chi2)
    num = chi2 + 2.0 * chi1 * (
        chi1 * (1.0 + 2.0 * chi1) ** 2 - (3.0 + 2.0 * chi1 + 4.0 * chi1 * chi1) * chi2 + 2.0 * chi2 * chi2
    )
    return num / (8.0 * chi1 * (2.0 * chi1 - chi2) ** 2)


def perceived_utility(chi1: float, chi2: float) -> tuple[float, float]:
    """Ex-ante utilities ``(V1, V2)`` as each player perceives them under their own cursedness."""
    return _perceived_first(chi1, chi2), _perceived_first(chi2, chi1)


def perceived_utility_quadrature(chi1: float, chi2: float) -> float:
    """Player 1's perceived utility by integrating interim values over own type."""
    t1, t2 = _thresholds(chi1, chi2)

    def trade_value(x):
        return (1.0 - chi1) * abs(x - t2) + chi1 * (x + t2 - 2.0 * x * t2)

    traded, _ = integrate.quad(trade_value, 0.0, t1, points=[t2] if 0.0 < t2 < t1 else None,
                               epsabs=1e-13, epsrel=1e-13)
    kept = 0.5 * (1.0 - t1 * t1)
    return traded + kept


def welfare_report(chi1: float, chi2: float) -> WelfareReport:
    u1, u2 = actual_utility(chi1, chi2)
    v1, v2 = perceived_utility(chi1, chi2)
    return WelfareReport(chi1, chi2, u1, u2, v1, v2, _thresholds(chi1, chi2))


def h0(chi1, chi2):
    """Polynomial whose sign gives the slope of ``V1`` in ``chi1`` when ``chi1 > chi2``."""
    return (
        4.0 * chi1**3 * (1.0 + 2.0 * chi1)
        - 2.0 * chi1 * (-3.0 + chi1 * (5.0 + 6.0 * chi1)) * chi2
        + (-1.0 + 2.0 * chi1) * (1.0 + 4.0 * chi1) * chi2**2
    )


def _nontrivial(c1: float, c2: float) -> bool:
    return max(c1, c2) > 0.5


@dataclass
class WelfareScan:
    """Outcome of checking the welfare orderings on a lattice."""

    cells: int = 0
    trivial_cells: int = 0
    violations: list = field(default_factory=list)
    boundary_equalities: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def _own_slope(f, c1: float, c2: float, on_ridge: bool, h: float = FD_STEP):
    """Finite difference of ``f(., c2)`` at ``c1``; one-sided where needed.

    Returns the difference quotient restricted to the nontrivial region and
    to one side of the ``c1 == c2`` ridge.
    """
    lo, hi = c1 - h, c1 + h
    left_ok = lo >= 0.0 and _nontrivial(lo, c2) and not on_ridge
    right_ok = hi <= 1.0 and _nontrivial(hi, c2)
    if on_ridge:
        # stay on the chi1 > chi2 side; the other side is covered by its own cells
        right_ok = hi <= 1.0
    if left_ok and right_ok:
        return (f(hi, c2) - f(lo, c2)) / (2 * h)
    if right_ok:
        return (f(hi, c2) - f(c1, c2)) / h
    if left_ok:
        return (f(c1, c2) - f(lo, c2)) / h
    return None


def welfare_property_scan(n: int = 101) -> WelfareScan:
    """Check the welfare orderings on the ``n x n`` lattice over ``[0, 1]^2``.

    Per nontrivial cell: constant sum; the less cursed player wins more than
    half; perceived utility exceeds actual utility and 1/2; utility falls in
    one's own cursedness and rises in the opponent's; perceived utility rises
    in one's own cursedness; ``V1 < V2`` when player 1 is more cursed; and
    ``h0 > 0`` where ``chi1 > max(chi2, 1/2)``.

    Two orderings become equalities on the lattice edge and are checked as
    such: a fully rational player (``chi = 0``) perceives exactly what they
    get, so ``V = U`` there; and ``V1 - V2`` carries a factor ``chi1 - 1``,
    so a fully cursed player perceives the same as the opponent.
    """
    grid = np.linspace(0.0, 1.0, n)
    scan = WelfareScan()
    u1f = lambda a, b: actual_utility(a, b)[0]  # noqa: E731
    v1f = lambda a, b: _perceived_first(a, b)  # noqa: E731
    for c1 in grid:
        for c2 in grid:
            c1, c2 = float(c1), float(c2)
            scan.cells += 1
            if not _nontrivial(c1, c2):
                scan.trivial_cells += 1
                continue
            r = welfare_report(c1, c2)
            bad = []
            if abs(r.U1 + r.U2 - 1.0) > 1e-12:
                bad.append("constant-sum")
            if c1 < c2 and not r.U1 > 0.5:
                bad.append("less-cursed U1 > 1/2")
            if c2 < c1 and not r.U2 > 0.5:
                bad.append("less-cursed U2 > 1/2")
            for chi, v, u, name in ((c1, r.V1, r.U1, "1"), (c2, r.V2, r.U2, "2")):
                if chi == 0.0:
                    if abs(v - u) > 1e-12 or not v > 0.5:
                        bad.append(f"V{name} = U{name} > 1/2 at chi = 0")
                    scan.boundary_equalities += 1
                elif not v > max(u, 0.5):
                    bad.append(f"V{name} > max(U{name}, 1/2)")
            for more, va, vb, name in ((c1 > c2, r.V1, r.V2, "V1 < V2"), (c2 > c1, r.V2, r.V1, "V2 < V1")):
                if not more:
                    continue
                if max(c1, c2) == 1.0:
                    if abs(va - vb) > 1e-12:
                        bad.append(f"{name} with equality at chi = 1")
                    scan.boundary_equalities += 1
                elif not va < vb:
                    bad.append(f"{name} when more cursed")
            ridge = c1 == c2
            du = _own_slope(u1f, c1, c2, ridge)
            if du is not None and not du < 0.0:
                bad.append("U1 decreasing in chi1")
            dv = _own_slope(v1f, c1, c2, ridge)
            if dv is not None and not dv > 0.0:
                bad.append("V1 increasing in chi1")
            du_opp = _own_slope(lambda a, b: u1f(b, a), c2, c1, ridge)
            if du_opp is not None and not du_opp > 0.0:
                bad.append("U1 increasing in chi2")
            if c1 > c2 and c1 > 0.5 and not h0(c1, c2) > 0.0:
                bad.append("h0 > 0")
            if bad:
                scan.violations.append(((c1, c2), bad))
    return scan
