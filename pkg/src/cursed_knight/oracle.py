"""Independent checks: simulation, brute-force band minimization and grid best responses.

Nothing here calls the closed-form best responses or equilibrium solvers.
Values against general (non-cut-off) strategies are computed from their
definitions: the worst case over a band of a linear functional of the CDF is
an exact linear program over the CDF values at the strategy's breakpoints.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .bands import CdfCurve, DistributionBand
from .valuation import CONCEPTS, TRADE, ValueQuery, no_trade_values, trade_values

BATCH = 1 << 18
CERTIFY_TOL = 1e-6
_MERGE_TOL = 1e-13


def thread_count() -> int:
    """Worker cap from ``CURSED_KNIGHT_THREADS``; defaults to the CPU count."""
    raw = os.environ.get("CURSED_KNIGHT_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return max(1, n) if n > 0 else max(1, os.cpu_count() or 1)


@dataclass(frozen=True)
class GeneralStrategy:
    """Type-contingent trade rule made of pieces ``(a, b, p)``.

    A type in ``[a, b]`` offers to trade with probability ``p``. Cut-off and
    interval-set strategies use ``p = 1``; tabulated strategies cover [0, 1]
    with consecutive cells.
    """

    pieces: tuple = ()
    kind: str = "intervals"

    @classmethod
    def cutoff(cls, threshold: float) -> "GeneralStrategy":
        return cls(((0.0, float(threshold), 1.0),), "cutoff")

    @classmethod
    def intervals(cls, spans) -> "GeneralStrategy":
        spans = sorted((float(a), float(b)) for a, b in spans)
        for (a, b), (c, _) in zip(spans, spans[1:]):
            if b >= c:
                raise ValueError("intervals must be disjoint")
        for a, b in spans:
            if not 0.0 <= a <= b <= 1.0:
                raise ValueError(f"interval [{a}, {b}] outside [0, 1]")
        return cls(tuple((a, b, 1.0) for a, b in spans), "intervals")

    @classmethod
    def tabulated(cls, edges, probs) -> "GeneralStrategy":
        edges = np.asarray(edges, dtype=float)
        probs = np.asarray(probs, dtype=float)
        if len(edges) != len(probs) + 1 or np.any(np.diff(edges) <= 0):
            raise ValueError("need increasing edges and one probability per cell")
        if edges[0] != 0.0 or edges[-1] != 1.0:
            raise ValueError("edges must span [0, 1]")
        if np.any(probs < 0) or np.any(probs > 1):
            raise ValueError("probabilities must lie in [0, 1]")
        return cls(tuple(zip(edges[:-1].tolist(), edges[1:].tolist(), probs.tolist())), "tabulated")

    def trade_probability(self, theta) -> np.ndarray:
        t = np.asarray(theta, dtype=float)
        out = np.zeros_like(t)
        for a, b, p in self.pieces:
            inside = (t >= a) & (t <= b)
            out = np.where(inside & (out == 0.0), p, out)
        return out

    def breakpoints(self) -> np.ndarray:
        pts = {0.0, 1.0}
        for a, b, _ in self.pieces:
            pts.update((a, b))
        return np.array(sorted(pts))

    def as_threshold(self) -> float | None:
        """The threshold when this is ``trade iff type <= t``, else None."""
        real = [(a, b) for a, b, p in self.pieces if p > 0 and b > a]
        if not real:
            return 0.0
        if len(real) == 1 and real[0][0] == 0.0 and all(p in (0.0, 1.0) for _, _, p in self.pieces):
            return real[0][1]
        return None


# -- simulation ---------------------------------------------------------------

def _draw_actions(strategy: GeneralStrategy, theta, rng) -> np.ndarray:
    p = strategy.trade_probability(theta)
    if np.all((p == 0.0) | (p == 1.0)):
        return p == 1.0
    return rng.random(theta.shape) < p


def _batch(args):
    s1, s2, cdf, size, seed_seq = args
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    u = rng.random((2, size))
    t1, t2 = cdf.inverse(u[0]), cdf.inverse(u[1])
    return kernels.tally_wins(t1, t2, _draw_actions(s1, t1, rng), _draw_actions(s2, t2, rng))


def simulate_game(
    strategy1: GeneralStrategy,
    strategy2: GeneralStrategy,
    sampling_cdf: CdfCurve,
    n: int,
    seed: int,
) -> tuple[float, float]:
    """Monte Carlo estimate of player 1's winning probability.

    Types are drawn i.i.d. by inverse-CDF sampling. Games are split into
    batches of ``BATCH``; batch ``i`` uses the ``i``-th child of
    ``SeedSequence(seed)`` with the PCG64 generator, so the result depends on
    ``(seed, n)`` only and not on the number of worker threads.

    Returns
    -------
    mean : float
    stderr : float
        Sample standard deviation of the per-game payoff over ``sqrt(n)``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    sizes = [BATCH] * (n // BATCH) + ([n % BATCH] if n % BATCH else [])
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(strategy1, strategy2, sampling_cdf, m, c) for m, c in zip(sizes, children)]
    workers = min(thread_count(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            wins = sum(pool.map(_batch, jobs))
    else:
        wins = sum(map(_batch, jobs))
    mean = wins / n
    var = mean * (1.0 - mean) * n / (n - 1) if n > 1 else 0.0
    return mean, float(np.sqrt(var / n))


# -- brute-force minimization over band members -------------------------------

MAXMIN_CONCEPTS = ("maxmin-rational", "maxmin-cursed-under-Fstar", "ambiguous-cursed")


def sample_band_knots(band: DistributionBand, samples: int, knots: int, seed: int):
    """Random monotone piecewise-linear CDFs inside ``band``.

    Per sample: ``knots`` sorted uniform x-values and ``knots`` sorted uniform
    y-values, y projected into ``[F_l(x), F_h(x)]`` and made monotone by a
    running maximum; the endpoints ``(0, 0)`` and ``(1, 1)`` are appended.
    Draws are taken row by row, so the first ``s`` samples do not depend on
    how many more are requested.
    """
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    raw = np.sort(rng.random((samples, 2, knots)), axis=2)
    x, y = raw[:, 0, :], raw[:, 1, :]
    y = np.clip(y, band.lower(x), band.upper(x))
    y = np.maximum.accumulate(y, axis=1)
    zeros = np.zeros((samples, 1))
    ones = np.ones((samples, 1))
    return np.hstack([zeros, x, ones]), np.hstack([zeros, y, ones])


def _band_values(band: DistributionBand, x, y, points) -> np.ndarray:
    """Sample CDF values at ``points`` (same for every row), clipped into the band.

    Clipping keeps the function monotone and continuous while making it a
    band member between knots too.
    """
    pts = np.broadcast_to(np.asarray(points, dtype=float), (x.shape[0], len(points)))
    raw = kernels.interp_rows(x, y, np.ascontiguousarray(pts))
    return np.clip(raw, band.lower(pts), band.upper(pts))


def _candidate_pairs(band: DistributionBand, theta: float, cutoff: float, samples: int, knots: int, seed: int,
                     flatten: bool = True):
    """Pairs ``(F(theta), F(cutoff))`` over the sampled band members.

    Besides the random samples and the two envelopes, each sample also yields
    two flattened members: follow the sample up to the lower point and stay
    at that level afterwards (clipped into the band), or hold the level of
    the upper point from the left and follow the sample afterwards.
    """
    x, y = sample_band_knots(band, samples, knots, seed)
    vals = _band_values(band, x, y, [theta, cutoff])
    fx, fy = vals[:, 0], vals[:, 1]
    env = [
        (band.lower(theta), band.lower(cutoff)),
        (band.upper(theta), band.upper(cutoff)),
    ]
    lo_pt, hi_pt = (theta, cutoff) if theta <= cutoff else (cutoff, theta)
    v_lo = np.where(theta <= cutoff, fx, fy)
    v_hi = np.where(theta <= cutoff, fy, fx)
    # hold v_lo from lo_pt onwards
    held_hi = np.clip(v_lo, band.lower(hi_pt), band.upper(hi_pt))
    # hold v_hi up to hi_pt
    held_lo = np.clip(v_hi, band.lower(lo_pt), band.upper(lo_pt))
    if theta <= cutoff:
        flat = [(v_lo, held_hi), (held_lo, v_hi)]
    else:
        flat = [(held_hi, v_lo), (v_hi, held_lo)]
    if not flatten:
        flat = []
    xs = np.concatenate([fx, [e[0] for e in env]] + [f[0] for f in flat])
    ys = np.concatenate([fy, [e[1] for e in env]] + [f[1] for f in flat])
    return xs, ys


def bruteforce_min_value(
    q: ValueQuery,
    concept: str = "maxmin-rational",
    samples: int = 500,
    knots: int = 16,
    seed: int = 0,
    flatten: bool = True,
) -> float:
    """Smallest value of ``q``'s action over sampled members of the band.

    Every candidate is a genuine band member, so the result is an upper
    bound on the true infimum that tightens as ``samples`` grows.
    ``flatten=False`` drops the flattened members and keeps only the random
    samples and the envelopes.
    """
    if concept not in MAXMIN_CONCEPTS:
        raise ValueError(f"concept must be one of {MAXMIN_CONCEPTS}")
    band = q.band
    band.require_normalized()
    theta, cutoff = q.own_type, q.opponent.threshold
    xs, ys = _candidate_pairs(band, theta, cutoff, samples, knots, seed, flatten)
    if q.action != TRADE:
        return float(np.min(xs))
    if concept == "maxmin-rational":
        vals = np.abs(xs - ys)
    elif concept == "maxmin-cursed-under-Fstar":
        s = band.center(cutoff)
        vals = s * (1.0 - xs) + (1.0 - s) * xs
    else:
        vals = xs + ys - 2.0 * xs * ys
    return float(np.min(vals))


# -- values against general strategies ----------------------------------------

def _cells(strategy: GeneralStrategy, theta: float):
    """Merged breakpoints with ``theta`` and the trade probability on each cell."""
    pts = np.union1d(strategy.breakpoints(), [theta])
    keep = np.concatenate([[True], np.diff(pts) > _MERGE_TOL])
    pts = pts[keep]
    mids = 0.5 * (pts[:-1] + pts[1:])
    return pts, strategy.trade_probability(mids), mids


def _mass(strategy: GeneralStrategy, curve: CdfCurve) -> float:
    return float(sum(p * (curve(b) - curve(a)) for a, b, p in strategy.pieces))


def _linear_over_band(band: DistributionBand, pts, cell_coef, fixed=None, sense: float = 1.0,
                      atom_first: bool = True) -> float:
    """``sense`` times the min of ``sense * sum_j c_j (F(x_{j+1}) - F(x_j))`` over the band.

    ``F`` at every breakpoint, ends included, ranges over the band's bounds
    there (these pin ``F(0) = 0`` and ``F(1) = 1`` for ordinary bands). Mass
    at 0 belongs to the first cell, so ``F(0-) = 0`` enters the first
    difference, unless ``atom_first`` is False. ``fixed`` optionally pins
    ``F`` at one point ``(x, value)``.
    """
    c = sense * np.asarray(cell_coef, dtype=float)
    coef = np.concatenate([[0.0 if atom_first else -c[0]], c[:-1] - c[1:], [c[-1]]])
    lo = np.asarray(band.lower(pts), dtype=float)
    # envelopes may cross by rounding where they meet
    hi = np.maximum(np.asarray(band.upper(pts), dtype=float), lo)
    if fixed is not None:
        at = np.isclose(pts, fixed[0], rtol=0.0, atol=_MERGE_TOL)
        lo = np.where(at, fixed[1], lo)
        hi = np.where(at, fixed[1], hi)
    return sense * kernels.min_monotone_linear(coef, lo, hi)


def _general_trade_value(concept: str, theta: float, opp: GeneralStrategy, band: DistributionBand, chi: float,
                         ambiguous_levels: int = 65) -> float:
    pts, probs, mids = _cells(opp, theta)
    above = mids > theta
    # the rational payoff weights: win by trading up, or keep against lower non-traders
    rational_coef = np.where(above, probs, 1.0 - probs)
    if concept in ("rational", "cursed", "partial"):
        f = band.center
        dens = np.diff(f(pts))
        rational = float(np.dot(rational_coef, dens))
        s = _mass(opp, f)
        x = f(theta)
        cursed = s * (1.0 - x) + (1.0 - s) * x
        if concept == "rational":
            return rational
        if concept == "cursed":
            return cursed
        return chi * cursed + (1.0 - chi) * rational
    if concept == "maxmin-rational":
        # an opponent tied with own type counts as neither above nor below
        return _linear_over_band(band, pts, rational_coef, atom_first=theta > 0.0)
    if concept == "maxmin-cursed-under-Fstar":
        s = _mass(opp, band.center)
        coef = 1.0 - 2.0 * s
        env = band.lower(theta) if coef >= 0 else band.upper(theta)
        return coef * env + s
    # ambiguous: for each level of F(theta), push the average strategy to its extreme
    xl, xh = band.lower(theta), band.upper(theta)
    bound_vals = np.concatenate([band.lower(pts), band.upper(pts)])
    levels = np.unique(np.concatenate([
        np.linspace(xl, xh, ambiguous_levels),
        bound_vals[(bound_vals >= xl) & (bound_vals <= xh)],
    ]))
    best = np.inf
    for lv in levels:
        sense = 1.0 if lv <= 0.5 else -1.0
        s = _linear_over_band(band, pts, probs, fixed=(theta, lv), sense=sense)
        best = min(best, lv + (1.0 - 2.0 * lv) * s)
    return float(best)


def general_values(concept: str, grid, opponent: GeneralStrategy, band: DistributionBand, chi: float = 0.0):
    """Trade and no-trade values on ``grid`` against ``opponent`` under ``concept``."""
    if concept not in CONCEPTS:
        raise ValueError(f"unknown concept {concept!r}")
    grid = np.asarray(grid, dtype=float)
    v_nt = np.asarray(no_trade_values(concept, grid, band), dtype=float)
    if opponent.kind == "cutoff":
        v_tr = np.asarray(trade_values(concept, grid, opponent.pieces[0][1], band, chi), dtype=float)
    else:
        v_tr = np.array([_general_trade_value(concept, float(t), opponent, band, chi) for t in grid])
    return v_tr, v_nt


def _runs_to_intervals(grid, trade) -> GeneralStrategy:
    spans = []
    start = None
    for i, flag in enumerate(trade):
        if flag and start is None:
            start = i
        if not flag and start is not None:
            spans.append((grid[start], grid[i - 1]))
            start = None
    if start is not None:
        spans.append((grid[start], grid[-1]))
    return GeneralStrategy.intervals(spans)


def grid_best_response(concept: str, opponent: GeneralStrategy, band: DistributionBand, grid_n: int = 1000,
                       chi: float = 0.0, ties: str = "no-trade") -> GeneralStrategy:
    """Per-type argmax on an equispaced grid.

    Exact ties go to no-trade by default; ``ties="trade"`` gives the largest
    optimal trade set instead.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    if ties not in ("no-trade", "trade"):
        raise ValueError("ties must be 'no-trade' or 'trade'")
    grid = np.linspace(0.0, 1.0, grid_n)
    v_tr, v_nt = general_values(concept, grid, opponent, band, chi)
    return _runs_to_intervals(grid, v_tr >= v_nt if ties == "trade" else v_tr > v_nt)


@dataclass
class EquilibriumCertificate:
    """Largest gain from switching action at any grid type, per player."""

    improvements: tuple
    worst_types: tuple
    tolerance: float = CERTIFY_TOL
    details: dict = field(default_factory=dict)

    @property
    def max_improvement(self) -> float:
        return max(self.improvements)

    @property
    def certified(self) -> bool:
        return self.max_improvement <= self.tolerance


def verify_equilibrium(
    profile: tuple[GeneralStrategy, GeneralStrategy],
    concepts: tuple[str, str],
    band: DistributionBand,
    grid_n: int = 1000,
    chis: tuple[float, float] = (0.0, 0.0),
    tolerance: float = CERTIFY_TOL,
) -> EquilibriumCertificate:
    """Check that no type of either player gains by switching action.

    The grid is ``grid_n`` equispaced types plus each player's own
    breakpoints, so isolated trading types are examined.
    """
    gains, where = [], []
    for k in (0, 1):
        own, opp = profile[k], profile[1 - k]
        grid = np.union1d(np.linspace(0.0, 1.0, grid_n), own.breakpoints())
        v_tr, v_nt = general_values(concepts[k], grid, opp, band, chis[k])
        p = own.trade_probability(grid)
        played = p * v_tr + (1.0 - p) * v_nt
        gain = np.maximum(v_tr, v_nt) - played
        i = int(np.argmax(gain))
        gains.append(float(max(gain[i], 0.0)))
        where.append(float(grid[i]))
    return EquilibriumCertificate(tuple(gains), tuple(where), tolerance)
