"""Equilibrium thresholds for every solution concept of the trading game."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bands import CdfCurve, DistributionBand, VALIDATION_POINTS, BandValidationError
from .best_response import (
    br_maxmin_cursed_under_Fstar,
    br_maxmin_rational,
    sum_inverse,
)
from .roots import decreasing_root, first_crossing
from .valuation import no_trade_values, trade_values

MEDIAN_TOL = 1e-12
RESIDUAL_TOL = 1e-9


@dataclass
class EquilibriumResult:
    """Equilibrium profiles of one concept.

    Attributes
    ----------
    concept : str
    profiles : list of (float, float)
        Thresholds of players 1 and 2. The trivial profile ``(0, 0)`` stands
        for every profile in which trade happens with probability zero.
    residuals : list of float
        Largest indifference-equation residual of each profile.
    method : str
        ``closed-form``, ``bisection``, ``fixed-point`` or ``2d-grid+polish``.
    trivial_included : bool
    warnings : list of str
    """

    concept: str
    profiles: list
    residuals: list
    method: str
    trivial_included: bool
    warnings: list = field(default_factory=list)

    @property
    def nontrivial(self) -> list:
        return [p for p in self.profiles if p != (0.0, 0.0)]

    def to_dict(self) -> dict:
        return {
            "concept": self.concept,
            "profiles": [list(p) for p in self.profiles],
            "residuals": list(self.residuals),
            "method": self.method,
            "trivial_included": self.trivial_included,
            "warnings": list(self.warnings),
        }


TRIVIAL = (0.0, 0.0)


def indifference_residual(concept: str, theta: float, cutoff: float, band: DistributionBand, chi: float = 0.0) -> float:
    """``|no-trade value - trade value|`` for a type at its own threshold."""
    return abs(no_trade_values(concept, theta, band) - trade_values(concept, theta, cutoff, band, chi))


def _certain_median(band: DistributionBand) -> bool:
    return abs(band.lower_median - band.upper_median) < MEDIAN_TOL


def solve_bne() -> EquilibriumResult:
    """Rational players never trade with positive probability."""
    return EquilibriumResult("bne", [TRIVIAL], [0.0], "closed-form", True)


def solve_cursed_no_uncertainty(center: CdfCurve) -> EquilibriumResult:
    """Fully cursed players both trade below the median of ``center``."""
    m = center.inverse(0.5)
    return EquilibriumResult("cursed", [TRIVIAL, (m, m)], [0.0, abs(center(m) - 0.5)], "closed-form", True)


def solve_knight_nash_cutoff(band: DistributionBand) -> EquilibriumResult:
    """Maxmin rational players admit only the no-trade cut-off profile."""
    band.require_normalized()
    return EquilibriumResult("knight-nash", [TRIVIAL], [0.0], "closed-form", True)


def iterate_maxmin_rational(band: DistributionBand, start: float = 1.0, steps: int = 200,
                            floor: float = 1e-9) -> list[float]:
    """Best-response iterates ``start, b(start), b(b(start)), ...``.

    Stops after ``steps`` iterations or at the first iterate below ``floor``;
    further iterates would sit at the root finder's resolution.
    """
    seq = [start]
    for _ in range(steps):
        if seq[-1] < floor:
            break
        seq.append(br_maxmin_rational(seq[-1], band).threshold)
    return seq


def symmetric_fixed_point_map(theta, band: DistributionBand):
    """``g = (F_h - F_l) / (2 F_h - 1)``; its fixed point is the symmetric threshold."""
    hi, lo = band.upper(theta), band.lower(theta)
    return (hi - lo) / (2.0 * hi - 1.0)


def _cursed_residual_pair(t1: float, t2: float, band: DistributionBand) -> float:
    c = "maxmin-cursed-under-Fstar"
    return max(indifference_residual(c, t1, t2, band), indifference_residual(c, t2, t1, band))


def symmetric_ckne_threshold(band: DistributionBand) -> float:
    band.require_normalized()
    if _certain_median(band):
        return band.lower_median
    return decreasing_root(lambda t: symmetric_fixed_point_map(t, band) - t, 0.5, band.lower_median)


def solve_symmetric_ckne(band: DistributionBand) -> EquilibriumResult:
    """Unique symmetric cursed maxmin equilibrium with the average strategy fixed by the center."""
    method = "closed-form" if _certain_median(band) else "fixed-point"
    t = symmetric_ckne_threshold(band)
    return EquilibriumResult(
        "symmetric-ckne", [TRIVIAL, (t, t)], [0.0, _cursed_residual_pair(t, t, band)], method, True
    )


def _residual_surfaces(band: DistributionBand, grid: np.ndarray):
    t1 = grid[:, None]
    t2 = grid[None, :]
    lo1, hi1 = band.lower(t1), band.upper(t1)
    lo2, hi2 = band.lower(t2), band.upper(t2)
    r1 = lo1 - (1.0 - 2.0 * t2) * hi1 - t2
    r2 = lo2 - (1.0 - 2.0 * t1) * hi2 - t1
    return r1, r2


def _changes_sign(r: np.ndarray) -> np.ndarray:
    corners = np.stack([r[:-1, :-1], r[1:, :-1], r[:-1, 1:], r[1:, 1:]])
    return (corners.min(axis=0) <= 0.0) & (corners.max(axis=0) >= 0.0)


def solve_all_ckne(band: DistributionBand, grid_n: int = 256) -> EquilibriumResult:
    """All cut-off solutions of the paired indifference equations.

    Both residual surfaces are tabulated on a ``grid_n x grid_n`` lattice over
    ``[1/2, F_l^-1(1/2)]^2``. Cells where both change sign are polished by
    bisection on ``t -> B(B(t)) - t``, with ``B`` the exact best response,
    which reduces the pair of equations to one monotone-bracketed equation.
    """
    band.require_normalized()
    if grid_n < 64:
        raise ValueError("grid_n must be at least 64")
    sym = symmetric_ckne_threshold(band)
    if _certain_median(band):
        return EquilibriumResult("all-ckne", [TRIVIAL, (sym, sym)], [0.0, _cursed_residual_pair(sym, sym, band)],
                                 "closed-form", True)
    top = band.lower_median
    grid = np.linspace(0.5, top, grid_n)
    r1, r2 = _residual_surfaces(band, grid)
    cells = np.argwhere(_changes_sign(r1) & _changes_sign(r2))

    def br(t):
        return br_maxmin_cursed_under_Fstar(t, band).threshold

    def twice(t):
        return br(br(t)) - t

    h = grid[1] - grid[0]
    roots: list[float] = []
    for i, _ in cells:
        a, b = max(grid[i] - h, 0.5), min(grid[i + 1] + h, top)
        fa, fb = twice(a), twice(b)
        if fa == 0.0:
            root = a
        elif fb == 0.0:
            root = b
        elif (fa > 0) != (fb > 0):
            sign = 1.0 if fa < 0 else -1.0
            root = first_crossing(lambda t: sign * twice(t), a, b)
        else:
            continue
        roots.append(root)

    # the symmetric solution goes first so its exact value wins deduplication
    profiles: list[tuple[float, float]] = [(sym, sym)]
    for t1 in sorted(roots):
        t2 = br(t1)
        if all(abs(t1 - p[0]) > 1e-7 or abs(t2 - p[1]) > 1e-7 for p in profiles):
            profiles.append((float(t1), float(t2)))
    # keep the swap-closed set of genuine solutions
    kept = [p for p in profiles if _cursed_residual_pair(*p, band) < RESIDUAL_TOL]
    warnings = []
    firsts = sorted(p[0] for p in kept)
    if any(b - a < 2 * h for a, b in zip(firsts, firsts[1:])):
        warnings.append("grid too coarse to separate neighbouring solutions")
    if len(kept) < len(profiles):
        warnings.append(f"{len(profiles) - len(kept)} candidate(s) discarded for residual above {RESIDUAL_TOL}")
    kept.sort()
    return EquilibriumResult(
        "all-ckne",
        [TRIVIAL] + kept,
        [0.0] + [_cursed_residual_pair(*p, band) for p in kept],
        "2d-grid+polish",
        True,
        warnings,
    )


def _cursed_uncursed_profile(band: DistributionBand) -> tuple[float, float]:
    return band.lower_median, sum_inverse(band, 0.5)


def solve_cursed_uncursed(band: DistributionBand) -> EquilibriumResult:
    """Player 1 cursed maxmin under the center, player 2 maxmin rational."""
    band.require_normalized()
    t1, t2 = _cursed_uncursed_profile(band)
    res = max(
        indifference_residual("maxmin-cursed-under-Fstar", t1, t2, band),
        indifference_residual("maxmin-rational", t2, t1, band),
    )
    return EquilibriumResult("cursed-uncursed", [TRIVIAL, (t1, t2)], [0.0, res], "closed-form", True)


def ambiguous_threshold_equation(theta, band: DistributionBand):
    """``2 (F_h - F_h^2) - F_l``; strictly decreasing above 1/2 with a unique root."""
    hi = band.upper(theta)
    return 2.0 * (hi - hi * hi) - band.lower(theta)


def ambiguous_ckne_threshold(band: DistributionBand) -> float:
    band.require_normalized()
    if _certain_median(band):
        return band.lower_median
    return decreasing_root(lambda t: ambiguous_threshold_equation(t, band), 0.5, band.lower_median)


def solve_ambiguous_ckne(band: DistributionBand) -> EquilibriumResult:
    """Symmetric equilibrium when the average strategy is also evaluated in the worst case."""
    t = ambiguous_ckne_threshold(band)
    res = indifference_residual("ambiguous-cursed", t, t, band)
    method = "closed-form" if _certain_median(band) else "bisection"
    return EquilibriumResult("ambiguous-ckne", [TRIVIAL, (t, t)], [0.0, res], method, True)


def solve_ambiguous_cursed_uncursed(band: DistributionBand) -> EquilibriumResult:
    """Player 1 ambiguous cursed, player 2 maxmin rational; same thresholds as the unambiguous case."""
    band.require_normalized()
    t1, t2 = _cursed_uncursed_profile(band)
    res = max(
        indifference_residual("ambiguous-cursed", t1, t2, band),
        indifference_residual("maxmin-rational", t2, t1, band),
    )
    return EquilibriumResult("ambiguous-cursed-uncursed", [TRIVIAL, (t1, t2)], [0.0, res], "closed-form", True)


def partial_thresholds(chi1: float, chi2: float) -> tuple[float, float] | None:
    """Equilibrium trade probabilities ``(F(t1), F(t2))``, or None when only no-trade survives."""
    for c in (chi1, chi2):
        if not 0.0 <= c <= 1.0:
            raise ValueError("chi values must lie in [0, 1]")
    hi, lo = max(chi1, chi2), min(chi1, chi2)
    if hi <= 0.5:
        return None
    more = (2.0 * hi - 1.0) / (2.0 * hi)
    less = (2.0 * hi - 1.0) / (2.0 * (2.0 * hi - lo))
    return (more, less) if chi1 >= chi2 else (less, more)


def solve_partial(chi1: float, chi2: float, center: CdfCurve) -> EquilibriumResult:
    """Equilibrium of two players cursed with weights ``chi1`` and ``chi2``."""
    from .bands import DistributionBand as _Band

    probs = partial_thresholds(chi1, chi2)
    if probs is None:
        return EquilibriumResult("partial", [TRIVIAL], [0.0], "closed-form", True)
    t1, t2 = center.inverse(probs[0]), center.inverse(probs[1])
    band = _Band(center, center, center, label="center")
    res = max(
        indifference_residual("partial", t1, t2, band, chi1),
        indifference_residual("partial", t2, t1, band, chi2),
    )
    return EquilibriumResult("partial", [TRIVIAL, (t1, t2)], [0.0, res], "closed-form", True)


@dataclass
class ComparativeStatics:
    """Envelope orderings at the equilibrium thresholds of a nested band pair."""

    theta_a: float
    theta_b: float
    lower_a: float
    lower_b: float
    upper_a: float
    upper_b: float
    amb_theta_a: float
    amb_theta_b: float
    amb_lower_a: float
    amb_lower_b: float
    amb_upper_a: float
    amb_upper_b: float

    @property
    def ckne_orderings(self) -> tuple[bool, bool]:
        return self.lower_b < self.lower_a, self.upper_b > self.upper_a

    @property
    def ambiguous_orderings(self) -> tuple[bool, bool]:
        return self.amb_lower_b < self.amb_lower_a, self.amb_upper_b > self.amb_upper_a


def comparative_statics_check(band_a: DistributionBand, band_b: DistributionBand) -> ComparativeStatics:
    """Compare equilibria when ``band_b`` strictly encloses ``band_a`` on (0, 1).

    Raises
    ------
    BandValidationError
        If the enclosure is not strict at every interior validation point.
    """
    band_a.require_normalized()
    band_b.require_normalized()
    grid = np.linspace(0.0, 1.0, VALIDATION_POINTS)[1:-1]
    if not (np.all(band_b.lower(grid) < band_a.lower(grid)) and np.all(band_b.upper(grid) > band_a.upper(grid))):
        raise BandValidationError("second band does not strictly enclose the first on (0, 1)")
    ta, tb = symmetric_ckne_threshold(band_a), symmetric_ckne_threshold(band_b)
    va, vb = ambiguous_ckne_threshold(band_a), ambiguous_ckne_threshold(band_b)
    return ComparativeStatics(
        ta, tb,
        band_a.lower(ta), band_b.lower(tb), band_a.upper(ta), band_b.upper(tb),
        va, vb,
        band_a.lower(va), band_b.lower(vb), band_a.upper(va), band_b.upper(vb),
    )
