import importlib

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from cursed_knight import _kernels_py, kernels

compiled = pytest.importorskip("cursed_knight._kernels")


def test_backend_selection(monkeypatch):
    assert kernels.BACKEND in ("compiled", "python")
    monkeypatch.setenv("CURSED_KNIGHT_PURE", "1")
    forced = importlib.reload(kernels)
    assert forced.BACKEND == "python"
    monkeypatch.delenv("CURSED_KNIGHT_PURE")
    importlib.reload(kernels)


@given(st.integers(0, 2**32 - 1), st.integers(1, 5000))
def test_tally_equivalence(seed, n):
    rng = np.random.default_rng(seed)
    t1, t2 = rng.random(n), rng.random(n)
    a1, a2 = rng.random(n) < 0.5, rng.random(n) < 0.5
    assert compiled.tally_wins(t1, t2, a1, a2) == _kernels_py.tally_wins(t1, t2, a1, a2)


@given(st.integers(0, 2**32 - 1), st.integers(1, 30), st.integers(2, 20), st.integers(1, 40))
def test_interp_equivalence(seed, s, k, m):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.random((s, k)), axis=1)
    x[:, 0], x[:, -1] = 0.0, 1.0
    y = np.sort(rng.random((s, k)), axis=1)
    t = rng.random((s, m))
    a = compiled.interp_rows(x, y, t)
    b = _kernels_py.interp_rows(x, y, t)
    np.testing.assert_allclose(a, b, atol=1e-14)
    for r in range(s):
        np.testing.assert_allclose(b[r], np.interp(t[r], x[r], y[r]), atol=1e-14)


def _random_lp(rng, m):
    coef = rng.normal(size=m)
    lo = np.sort(rng.random(m)) * 0.8
    hi = np.maximum(lo + rng.random(m) * 0.5, np.maximum.accumulate(lo))
    hi = np.minimum(np.maximum.accumulate(hi), 1.0)
    return coef, lo, np.maximum(hi, lo)


@given(st.integers(0, 2**32 - 1), st.integers(1, 25))
def test_monotone_lp_matches_linprog(seed, m):
    rng = np.random.default_rng(seed)
    coef, lo, hi = _random_lp(rng, m)
    # y_k - y_{k+1} <= 0
    a_ub = np.zeros((max(m - 1, 0), m))
    for k in range(m - 1):
        a_ub[k, k], a_ub[k, k + 1] = 1.0, -1.0
    res = linprog(coef, A_ub=a_ub if m > 1 else None, b_ub=np.zeros(m - 1) if m > 1 else None,
                  bounds=list(zip(lo, hi)), method="highs")
    assert res.status == 0
    dp_py = _kernels_py.min_monotone_linear(coef, lo, hi)
    dp_c = compiled.min_monotone_linear(coef, lo, hi)
    assert dp_py == pytest.approx(res.fun, abs=1e-9)
    assert dp_c == pytest.approx(dp_py, abs=1e-12)


def test_monotone_lp_infeasible_and_empty():
    assert _kernels_py.min_monotone_linear([1.0, 1.0], [0.6, 0.0], [0.7, 0.5]) == np.inf
    assert compiled.min_monotone_linear([1.0, 1.0], [0.6, 0.0], [0.7, 0.5]) == np.inf
    assert _kernels_py.min_monotone_linear([], [], []) == 0.0
    assert compiled.min_monotone_linear([], [], []) == 0.0
