import numpy as np
import pytest
from hypothesis import given, strategies as st

from cursed_knight.bands import make_parametrized_band, zero_uncertainty_band
from cursed_knight.best_response import (
    BestResponseQuery,
    ambiguous_indifference,
    best_response,
    br_ambiguous_cursed,
    br_maxmin_cursed_under_Fstar,
    br_maxmin_rational,
    br_partial,
)
from cursed_knight.oracle import GeneralStrategy, grid_best_response
from cursed_knight.valuation import CONCEPTS, CutoffStrategy

U = zero_uncertainty_band()
K = make_parametrized_band("contamination", 0.75)
RANGES = {"contamination": (0.0, 0.99), "triangle": (1.0, 50.0), "epsilon": (0.0, 0.49)}
bands = st.builds(
    lambda fam, u: make_parametrized_band(fam, RANGES[fam][0] + u * (RANGES[fam][1] - RANGES[fam][0])),
    st.sampled_from(sorted(RANGES)),
    st.floats(0.0, 1.0),
)


def test_partial_examples():
    assert br_partial(0.0, 0.6, U).threshold == pytest.approx(0.3)
    assert br_partial(1.0, 0.2, U).threshold == pytest.approx(0.5)
    assert br_partial(0.4, 0.5, U).threshold == pytest.approx(0.3125)


def test_maxmin_rational_examples():
    assert br_maxmin_rational(0.6, U).threshold == pytest.approx(0.3, abs=1e-12)
    assert br_maxmin_rational(0.6, K).threshold == pytest.approx(0.15, abs=1e-12)
    assert br_maxmin_rational(1.0, make_parametrized_band("epsilon", 0.2)).threshold == pytest.approx(0.4, abs=1e-12)


def test_maxmin_cursed_examples():
    assert br_maxmin_cursed_under_Fstar(0.4, K).threshold == pytest.approx(5.0 / 7.0, abs=1e-12)
    assert br_maxmin_cursed_under_Fstar(0.7, U).threshold == pytest.approx(0.5, abs=1e-12)
    theta = (4 * 0.75 - 1 - np.sqrt(8 * 0.75 + 1)) / (4 * (0.75 - 1))
    assert br_maxmin_cursed_under_Fstar(theta, K).threshold == pytest.approx(theta, abs=1e-11)


def test_ambiguous_examples():
    for c in (0.1, 0.5, 0.9):
        assert br_ambiguous_cursed(c, U).threshold == pytest.approx(0.5, abs=1e-12)
    vt = 9.0 / 16.0
    k37 = make_parametrized_band("contamination", 3.0 / 7.0)
    assert br_ambiguous_cursed(vt, k37).threshold == pytest.approx(vt, abs=1e-11)
    c = K.upper_median
    assert c == pytest.approx(2.0 / 7.0)
    assert br_ambiguous_cursed(c, K).threshold >= 1.0 - c - 1e-12


def test_degenerate_flag():
    for concept in CONCEPTS:
        br = best_response(BestResponseQuery(concept, CutoffStrategy(0.0), K))
        assert br.threshold == 0.0 and br.degenerate
    # opponent who may never trade in the worst case: largest optimal threshold, flagged
    eps = make_parametrized_band("epsilon", 0.3)
    br = br_ambiguous_cursed(0.2, eps)
    assert br.degenerate and br.threshold == pytest.approx(eps.lower_median)
    g = grid_best_response("ambiguous-cursed", GeneralStrategy.cutoff(0.2), eps, 2000, ties="trade")
    assert abs(g.as_threshold() - br.threshold) <= 1.0 / 1999
    assert grid_best_response("ambiguous-cursed", GeneralStrategy.cutoff(0.2), eps, 2000).as_threshold() == 0.0


@given(bands, st.floats(1e-6, 1.0))
def test_maxmin_rational_undercuts(band, c):
    assert br_maxmin_rational(c, band).threshold < c


@given(bands, st.floats(1e-6, 1.0), st.floats(0.0, 1.0))
def test_partial_monotone(band, c, u):
    chi_lo, chi_hi = sorted((u, min(u + 0.1, 1.0)))
    a, b = sorted((c, min(c + 0.05, 1.0)))
    assert br_partial(u, a, band).threshold <= br_partial(u, b, band).threshold + 1e-15
    if c < 1.0 and chi_lo < chi_hi:
        assert br_partial(chi_lo, c, band).threshold < br_partial(chi_hi, c, band).threshold


@given(bands)
def test_ambiguous_decreasing_on_middle_interval(band):
    lo, hi = band.upper_median, band.lower_median
    if hi - lo < 1e-9:
        return
    cs = np.linspace(lo, hi, 41)
    t = np.array([br_ambiguous_cursed(float(c), band).threshold for c in cs])
    assert np.all(np.diff(t) <= 1e-12)
    assert np.all(t >= 1.0 - cs - 1e-12)
    assert np.all(t <= hi + 1e-12)
    # continuity at lattice resolution
    assert np.max(np.abs(np.diff(t))) < 0.1


@given(bands, st.floats(0.01, 1.0))
def test_ambiguous_root_is_indifference(band, c):
    t = br_ambiguous_cursed(c, band).threshold
    if band.upper(c) >= 0.5 and band.lower(c) > 0.0 and band.lower_median > band.upper_median:
        assert abs(ambiguous_indifference(t, c, band)) < 1e-9 or t in (band.upper_median, band.lower_median)


@pytest.mark.parametrize("concept", CONCEPTS)
def test_grid_best_response_is_single_cutoff(concept):
    rng = np.random.default_rng(3)
    for _ in range(10):
        fam = sorted(RANGES)[rng.integers(3)]
        band = make_parametrized_band(fam, rng.uniform(*RANGES[fam]))
        c = rng.uniform(0.01, 1.0)
        chi = rng.uniform()
        br = best_response(BestResponseQuery(concept, CutoffStrategy(c), band, chi))
        g = grid_best_response(concept, GeneralStrategy.cutoff(c), band, 2000, chi,
                               ties="trade" if br.degenerate else "no-trade")
        t = g.as_threshold()
        assert t is not None
        assert abs(t - br.threshold) <= 1.0 / 1999 + 1e-12
