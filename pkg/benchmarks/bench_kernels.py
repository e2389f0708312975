"""Time the compiled oracle kernels against their numpy fallbacks.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from cursed_knight import _kernels_py

try:
    from cursed_knight import _kernels as _compiled
except ImportError:
    _compiled = None


def _cases(rng):
    n = 1 << 20
    t1, t2 = rng.random(n), rng.random(n)
    a1, a2 = t1 < 0.6, t2 < 0.6
    x = np.sort(rng.random((2000, 18)), axis=1)
    x[:, 0], x[:, -1] = 0.0, 1.0
    y = np.sort(rng.random((2000, 18)), axis=1)
    t = np.ascontiguousarray(np.broadcast_to(rng.random(2), (2000, 2)))
    m = 400
    coef = rng.normal(size=m)
    lo = np.sort(rng.random(m)) * 0.5
    hi = np.minimum(lo + 0.5, 1.0)
    return {
        "tally_wins (2^20 games)": lambda k: k.tally_wins(t1, t2, a1, a2),
        "interp_rows (2000 x 18 knots)": lambda k: k.interp_rows(x, y, t),
        "min_monotone_linear (400 breakpoints)": lambda k: k.min_monotone_linear(coef, lo, hi),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':40s} {'numpy ms':>10s} {'compiled ms':>12s} {'speed-up':>9s}")
    for name, call in _cases(rng).items():
        py = min(timeit.repeat(lambda: call(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if _compiled is None:
            print(f"{name:40s} {py:10.3f} {'n/a':>12s} {'':>9s}")
            continue
        assert np.allclose(call(_compiled), call(_kernels_py))
        cc = min(timeit.repeat(lambda: call(_compiled), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:40s} {py:10.3f} {cc:12.3f} {py / cc:8.1f}x")


if __name__ == "__main__":
    main()
