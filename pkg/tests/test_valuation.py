import numpy as np
import pytest
from hypothesis import given, strategies as st

from cursed_knight.bands import BandValidationError, DistributionBand, PowerCurve, make_parametrized_band, zero_uncertainty_band
from cursed_knight.oracle import bruteforce_min_value
from cursed_knight.valuation import (
    CONCEPTS,
    NO_TRADE,
    TRADE,
    CutoffStrategy,
    ValueQuery,
    no_trade_values,
    trade_values,
    value_ambiguous_cursed,
    value_cursed,
    value_maxmin_cursed_under_Fstar,
    value_maxmin_rational,
    value_partial_cursed,
    value_rational,
)

U = zero_uncertainty_band()
K = make_parametrized_band("contamination", 0.75)
RANGES = {"contamination": (0.0, 0.99), "triangle": (1.0, 50.0), "epsilon": (0.0, 0.49)}


def q(theta, action, cutoff, band=U, chi=0.0):
    return ValueQuery(theta, action, CutoffStrategy(cutoff), band, chi)


bands = st.builds(
    lambda fam, u: make_parametrized_band(fam, RANGES[fam][0] + u * (RANGES[fam][1] - RANGES[fam][0])),
    st.sampled_from(sorted(RANGES)),
    st.floats(0.0, 1.0),
)
unit = st.floats(0.0, 1.0)


def test_rational_examples():
    assert value_rational(q(0.3, NO_TRADE, 0.5)) == pytest.approx(0.3)
    assert value_rational(q(0.3, TRADE, 0.5)) == pytest.approx(0.2)
    assert value_rational(q(0.5, TRADE, 0.5)) == 0.0


def test_cursed_examples():
    assert value_cursed(q(0.3, TRADE, 0.5)) == pytest.approx(0.5)
    assert value_cursed(q(0.3, NO_TRADE, 0.5)) == pytest.approx(0.3)
    assert value_cursed(q(0.7, TRADE, 0.2)) == pytest.approx(0.62)


def test_maxmin_rational_examples():
    assert value_maxmin_rational(q(0.3, TRADE, 0.5)) == pytest.approx(0.2)
    assert value_maxmin_rational(q(0.1, TRADE, 0.6, K)) == pytest.approx(0.125)
    assert value_maxmin_rational(q(0.5, TRADE, 0.5, K)) == 0.0


def test_maxmin_cursed_examples():
    for band in (U, K, make_parametrized_band("triangle", 7.0)):
        for theta in (0.0, 0.2, 0.9):
            assert value_maxmin_cursed_under_Fstar(q(theta, TRADE, 0.5, band)) == pytest.approx(0.5, abs=1e-15)
    assert value_maxmin_cursed_under_Fstar(q(0.5, NO_TRADE, 0.3, K)) == pytest.approx(0.125)
    assert value_maxmin_cursed_under_Fstar(q(0.3, TRADE, 0.5)) == pytest.approx(0.5)


def test_ambiguous_examples():
    assert value_ambiguous_cursed(q(0.3, TRADE, 0.5)) == pytest.approx(0.5)
    assert value_ambiguous_cursed(q(0.5, TRADE, 0.5, K)) == pytest.approx(0.21875, abs=1e-15)
    assert value_ambiguous_cursed(q(0.4, NO_TRADE, 0.7, K)) == pytest.approx(K.lower(0.4))


def test_ambiguous_matches_x2_formula():
    # inside the middle region the minimum uses the lower envelope below 1 - cutoff
    cut = 0.6
    for theta in np.linspace(K.upper_median, 1.0 - cut, 5):
        x, y = K.lower(theta), K.lower(cut)
        assert value_ambiguous_cursed(q(theta, TRADE, cut, K)) == pytest.approx(x + y - 2 * x * y, abs=1e-14)


def test_partial_examples():
    assert value_partial_cursed(q(0.3, TRADE, 0.5, chi=0.5)) == pytest.approx(0.35)


@given(unit, unit, unit)
def test_partial_endpoints(theta, cutoff, dummy):
    assert value_partial_cursed(q(theta, TRADE, cutoff, chi=0.0)) == pytest.approx(value_rational(q(theta, TRADE, cutoff)))
    assert value_partial_cursed(q(theta, TRADE, cutoff, chi=1.0)) == pytest.approx(value_cursed(q(theta, TRADE, cutoff)))


def test_maxmin_needs_normalized_band():
    sq = PowerCurve(2.0)
    raw = DistributionBand(sq, sq, sq)
    with pytest.raises(BandValidationError):
        value_maxmin_rational(q(0.3, TRADE, 0.5, raw))


@given(bands, unit, unit, st.sampled_from(CONCEPTS), unit)
def test_values_in_unit_interval(band, theta, cutoff, concept, chi):
    v = trade_values(concept, theta, cutoff, band, chi)
    assert -1e-15 <= v <= 1.0 + 1e-15
    assert 0.0 <= no_trade_values(concept, theta, band) <= 1.0


@given(bands, unit, unit)
def test_maxmin_below_center_values(band, theta, cutoff):
    assert trade_values("maxmin-rational", theta, cutoff, band) <= trade_values("rational", theta, cutoff, band) + 1e-15
    assert trade_values("maxmin-cursed-under-Fstar", theta, cutoff, band) <= trade_values("cursed", theta, cutoff, band) + 1e-15
    assert no_trade_values("maxmin-rational", theta, band) <= no_trade_values("rational", theta, band)


@given(bands, unit, unit)
def test_ambiguous_below_fstar(band, theta, cutoff):
    amb = trade_values("ambiguous-cursed", theta, cutoff, band)
    fst = trade_values("maxmin-cursed-under-Fstar", theta, cutoff, band)
    assert amb <= fst + 1e-15


@given(bands, st.floats(0.0, 0.49), st.floats(0.51, 1.0))
def test_fstar_monotone_sign_structure(band, low, high):
    grid = np.linspace(0.0, 1.0, 201)
    up = trade_values("maxmin-cursed-under-Fstar", grid, low, band)
    down = trade_values("maxmin-cursed-under-Fstar", grid, high, band)
    assert np.all(np.diff(up) >= -1e-15)
    assert np.all(np.diff(down) <= 1e-15)
    # strict wherever the active envelope is strictly increasing
    assert np.all(np.diff(up)[np.diff(band.lower(grid)) > 0] > 0)
    assert np.all(np.diff(down)[np.diff(band.upper(grid)) > 0] < 0)


@given(bands, unit, unit, st.sampled_from(["maxmin-rational", "maxmin-cursed-under-Fstar", "ambiguous-cursed"]),
       st.integers(0, 2**31 - 1))
def test_bruteforce_equivalence(band, theta, cutoff, concept, seed):
    for action in (TRADE, NO_TRADE):
        query = q(theta, action, cutoff, band)
        exact = trade_values(concept, theta, cutoff, band) if action == TRADE else no_trade_values(concept, theta, band)
        brute = bruteforce_min_value(query, concept, samples=200, seed=seed)
        assert brute == pytest.approx(exact, abs=1e-6)


def test_vectorized_matches_scalar():
    grid = np.linspace(0.0, 1.0, 33)
    for concept in CONCEPTS:
        vec = trade_values(concept, grid, 0.55, K, 0.7)
        sca = [trade_values(concept, float(t), 0.55, K, 0.7) for t in grid]
        np.testing.assert_allclose(vec, sca, atol=0.0)
