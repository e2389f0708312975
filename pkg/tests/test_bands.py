import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cursed_knight.bands import (
    BandValidationError,
    DistributionBand,
    FormulaCurve,
    IdentityCurve,
    PiecewiseLinearCurve,
    PowerCurve,
    band_from_dict,
    builtin_band,
    load_band,
    make_parametrized_band,
    normalize_band,
    to_piecewise_linear,
    zero_uncertainty_band,
)

GRID = np.linspace(0.0, 1.0, 1025)
FAMILIES = [("contamination", 0.0, 0.99), ("triangle", 1.0, 50.0), ("epsilon", 0.0, 0.49)]


def family_params(n=7):
    for fam, lo, hi in FAMILIES:
        for p in np.linspace(lo, hi, n):
            yield fam, float(p)


def test_evaluate_examples():
    b = make_parametrized_band("contamination", 0.75)
    assert b.upper(0.5) == pytest.approx(0.875, abs=1e-15)
    assert IdentityCurve()(0.3) == 0.3
    t = make_parametrized_band("triangle", 2.0)
    assert t.lower(2.0 / 3.0) == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_inverse_examples():
    assert make_parametrized_band("contamination", 0.75).lower.inverse(0.5) == pytest.approx(5.0 / 7.0, abs=1e-12)
    assert IdentityCurve().inverse(0.5) == 0.5
    assert make_parametrized_band("epsilon", 0.2).lower.inverse(0.5) == pytest.approx(0.7, abs=1e-12)


def test_domain_error():
    with pytest.raises(ValueError):
        IdentityCurve()(1.5)
    with pytest.raises(ValueError):
        IdentityCurve().inverse(-0.1)


def test_parametrized_limits_are_uniform():
    for fam, p in (("contamination", 0.0), ("triangle", 1.0), ("epsilon", 0.0)):
        b = make_parametrized_band(fam, p)
        np.testing.assert_allclose(b.lower(GRID), GRID, atol=1e-15)
        np.testing.assert_allclose(b.upper(GRID), GRID, atol=1e-15)


def test_epsilon_values_and_jump_convention():
    b = make_parametrized_band("epsilon", 0.2)
    assert b.upper(0.5) == pytest.approx(0.7)
    assert b.lower(0.5) == pytest.approx(0.3)
    assert b.lower(1.0) == 1.0
    assert b.lower.left_limit(1.0) == pytest.approx(0.8)
    assert b.relaxed


@pytest.mark.parametrize("family,lo,hi", FAMILIES)
def test_parameter_range_errors(family, lo, hi):
    with pytest.raises(ValueError):
        make_parametrized_band(family, lo - 0.5)


@pytest.mark.parametrize("family,param", list(family_params()))
def test_band_ordering_and_symmetry(family, param):
    b = make_parametrized_band(family, param)
    assert np.all(b.lower(GRID) <= GRID + 1e-15)
    assert np.all(GRID <= b.upper(GRID) + 1e-15)
    assert b.symmetry_error() <= 1e-12


@pytest.mark.parametrize("family,param", list(family_params()))
def test_round_trip(family, param):
    b = make_parametrized_band(family, param)
    for curve in (b.lower, b.upper):
        x = GRID[1:-1]
        y = curve(x)
        strict = (y > 0.0) & (y < 1.0)
        np.testing.assert_allclose(curve.inverse(y[strict]), x[strict], atol=1e-10)


@given(st.floats(0.0, 1.0), st.sampled_from(["contamination", "triangle", "epsilon"]), st.floats(0.0, 1.0))
def test_generalized_inverse_is_infimum(p, family, u):
    lo, hi = {"contamination": (0.0, 0.99), "triangle": (1.0, 50.0), "epsilon": (0.0, 0.49)}[family]
    b = make_parametrized_band(family, lo + u * (hi - lo))
    for curve in (b.lower, b.upper):
        x = curve.inverse(p)
        assert curve(x) >= p - 1e-12
        if x > 1e-9:
            assert curve(max(x - 1e-7, 0.0)) <= p + 1e-12


def test_normalize_identity_center_unchanged():
    b = make_parametrized_band("triangle", 3.0)
    assert normalize_band(b) is b


def test_normalize_zero_uncertainty_square_center():
    sq = PowerCurve(2.0)
    band = DistributionBand(sq, sq, sq)
    n = normalize_band(band)
    assert n.normalized
    np.testing.assert_allclose(n.lower(GRID), GRID, atol=1e-12)
    np.testing.assert_allclose(n.upper(GRID), GRID, atol=1e-12)


def test_normalize_composed_example():
    sq = PowerCurve(2.0)
    lower = FormulaCurve("0.9 t^2", lambda t: 0.9 * t * t)
    upper = FormulaCurve("min(1.1 t^2, 1)", lambda t: np.minimum(1.1 * t * t, 1.0))
    n = normalize_band(DistributionBand(lower, sq, upper))
    p = np.linspace(0.0, 0.99, 100)
    np.testing.assert_allclose(n.lower(p), 0.9 * p, atol=1e-12)


def test_normalize_idempotent():
    sq = PowerCurve(2.0)
    n = normalize_band(DistributionBand(sq, sq, sq))
    assert normalize_band(n) is n


def test_ordering_violation_raises():
    with pytest.raises(BandValidationError):
        DistributionBand(PowerCurve(0.5), IdentityCurve(), IdentityCurve())


def test_piecewise_linear_inverse_with_flat_segment():
    c = PiecewiseLinearCurve([[0, 0], [0.2, 0.4], [0.6, 0.4], [1, 1]])
    assert c(0.4) == pytest.approx(0.4)
    assert c.inverse(0.4) == pytest.approx(0.2)
    assert not c.strictly_increasing


def test_to_piecewise_linear_accuracy():
    b = make_parametrized_band("triangle", 4.0)
    pl = to_piecewise_linear(b.upper, 1024)
    assert np.max(np.abs(pl(GRID) - b.upper(GRID))) < 1e-5


def test_band_json_round_trip(tmp_path):
    doc = {"custom": {"lower": [[0, 0], [0.5, 0.25], [1, 1]], "upper": [[0, 0], [0.5, 0.75], [1, 1]]}}
    path = tmp_path / "band.json"
    path.write_text(json.dumps(doc))
    b = load_band(path)
    assert b.normalized
    assert b.lower(0.5) == pytest.approx(0.25)
    assert band_from_dict({"family": "contamination", "param": 0.5}).upper(0.2) == pytest.approx(0.3)
    with pytest.raises(BandValidationError):
        band_from_dict({"custom": {"lower": [[0, 0], [1, 1]]}})
    with pytest.raises(BandValidationError):
        band_from_dict({"param": 1})


@pytest.mark.parametrize("name", ["multiple-equilibria", "nonmonotone-narrow", "nonmonotone-wide"])
def test_builtin_bands_valid(name):
    b = builtin_band(name)
    assert b.normalized
    assert b.symmetry_error() <= 1e-9
    assert b.lower(0.0) == pytest.approx(0.0, abs=1e-12)
    assert b.upper(1.0) == pytest.approx(1.0, abs=1e-12)


def test_zero_uncertainty_band():
    b = zero_uncertainty_band()
    assert b.lower_median == b.upper_median == 0.5
