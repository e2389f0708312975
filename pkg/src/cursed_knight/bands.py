"""Distribution bands: a lower envelope, a center CDF and an upper envelope on [0, 1].

Every curve is a weakly increasing map of [0, 1] into [0, 1]. Evaluation is
vectorized over numpy arrays; scalars go in and come out as floats.
Inverses use the infimum convention ``inf {x : F(x) >= p}`` so flat stretches
have well-defined quantiles.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

VALIDATION_POINTS = 1025
ORDER_TOL = 1e-10
SYMMETRY_TOL = 1e-9
_DOMAIN_SLACK = 1e-12

FAMILIES = ("contamination", "triangle", "epsilon")
BUILTIN_BANDS = ("multiple-equilibria", "nonmonotone-narrow", "nonmonotone-wide")


class BandValidationError(ValueError):
    """A band or curve violates its structural invariants."""


def _as_unit(x, name: str = "theta") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < -_DOMAIN_SLACK) or np.any(arr > 1 + _DOMAIN_SLACK):
        raise ValueError(f"{name} must lie in [0, 1], got {x!r}")
    return np.clip(arr, 0.0, 1.0)


def _out(arr: np.ndarray, scalar: bool):
    return float(arr) if scalar else arr


def _bisect_inverse(func: Callable[[np.ndarray], np.ndarray], p: np.ndarray) -> np.ndarray:
    # vectorized generalized inverse of a nondecreasing map on [0, 1]
    lo = np.zeros_like(p)
    hi = np.ones_like(p)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        up = func(mid) >= p
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    return np.where(func(np.zeros_like(p)) >= p, 0.0, hi)


class CdfCurve:
    """Weakly increasing map of [0, 1] into [0, 1].

    Subclasses implement ``_eval`` and ``_inv`` on float arrays.
    """

    kind: str = "abstract"
    strictly_increasing: bool = True

    def _eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inv(self, p: np.ndarray) -> np.ndarray:
        return _bisect_inverse(self._eval, p)

    def evaluate(self, theta):
        """Return F(theta); raises ``ValueError`` outside [0, 1]."""
        scalar = np.ndim(theta) == 0
        return _out(np.clip(self._eval(_as_unit(theta)), 0.0, 1.0), scalar)

    __call__ = evaluate

    def inverse(self, p):
        """Generalized inverse ``inf {x : F(x) >= p}``."""
        scalar = np.ndim(p) == 0
        return _out(np.clip(self._inv(_as_unit(p, "p")), 0.0, 1.0), scalar)

    def left_limit(self, theta):
        """Left limit F(theta-); equals ``evaluate`` for continuous curves."""
        return self.evaluate(theta)

    def describe(self) -> dict[str, Any]:
        return {"kind": self.kind}

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()})"


class IdentityCurve(CdfCurve):
    """The uniform CDF F(x) = x."""

    kind = "uniform-identity"

    def _eval(self, x):
        return x.copy()

    def _inv(self, p):
        return p.copy()


class ContaminationCurve(CdfCurve):
    """Envelope of the contamination family with weight ``kappa`` around the identity."""

    kind = "contamination"

    def __init__(self, kappa: float, side: str):
        if not 0.0 <= kappa < 1.0:
            raise ValueError(f"kappa must lie in [0, 1), got {kappa}")
        if side not in ("lower", "upper"):
            raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
        self.kappa = float(kappa)
        self.side = side

    def _eval(self, x):
        k = self.kappa
        if self.side == "lower":
            return np.where(x <= 0.5, (1 - k) * x, -k + (1 + k) * x)
        return np.where(x <= 0.5, (1 + k) * x, k + (1 - k) * x)

    def _inv(self, p):
        k = self.kappa
        if self.side == "lower":
            return np.where(p <= (1 - k) / 2, p / (1 - k), (p + k) / (1 + k))
        return np.where(p <= (1 + k) / 2, p / (1 + k), (p - k) / (1 - k))

    def describe(self):
        return {"kind": self.kind, "side": self.side, "kappa": self.kappa}


class TriangleCurve(CdfCurve):
    """Envelope of the triangle family with slope parameter ``a >= 1``."""

    kind = "triangle"

    def __init__(self, a: float, side: str):
        if not a >= 1.0 or not math.isfinite(a):
            raise ValueError(f"a must lie in [1, inf), got {a}")
        if side not in ("lower", "upper"):
            raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
        self.a = float(a)
        self.side = side

    def _eval(self, x):
        a = self.a
        if self.side == "lower":
            return np.where(x <= a / (a + 1), x / a, a * x + 1 - a)
        return np.where(x <= 1 / (a + 1), a * x, x / a + 1 - 1 / a)

    def _inv(self, p):
        a = self.a
        if self.side == "lower":
            return np.where(p <= 1 / (a + 1), a * p, (p - 1 + a) / a)
        return np.where(p <= a / (a + 1), p / a, a * p - a + 1)

    def describe(self):
        return {"kind": self.kind, "side": self.side, "a": self.a}


class EpsilonCurve(CdfCurve):
    """Envelope of the epsilon band.

    The lower envelope is ``max(x - eps, 0)`` on [0, 1) and jumps to 1 at
    ``x = 1`` (right-continuous). The upper envelope is ``min(x + eps, 1)``,
    so it starts at ``eps`` rather than 0.
    """

    kind = "epsilon"
    strictly_increasing = False

    def __init__(self, eps: float, side: str):
        if not 0.0 <= eps < 0.5:
            raise ValueError(f"eps must lie in [0, 1/2), got {eps}")
        if side not in ("lower", "upper"):
            raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")
        self.eps = float(eps)
        self.side = side
        self.strictly_increasing = eps == 0.0

    def _eval(self, x):
        e = self.eps
        if self.side == "lower":
            return np.where(x < 1.0, np.maximum(x - e, 0.0), 1.0)
        return np.minimum(x + e, 1.0)

    def _inv(self, p):
        e = self.eps
        if self.side == "lower":
            inner = np.where(p <= 0.0, 0.0, p + e)
            return np.where(p > 1 - e, 1.0, inner)
        return np.where(p <= e, 0.0, p - e)

    def left_limit(self, theta):
        scalar = np.ndim(theta) == 0
        x = _as_unit(theta)
        if self.side == "lower":
            return _out(np.maximum(x - self.eps, 0.0), scalar)
        return _out(np.minimum(x + self.eps, 1.0), scalar)

    def describe(self):
        return {"kind": self.kind, "side": self.side, "eps": self.eps}


class PiecewiseLinearCurve(CdfCurve):
    """Linear interpolation through ordered knots ``(x, y)`` in the unit square."""

    kind = "custom-piecewise-linear"

    def __init__(self, knots):
        pts = np.asarray(knots, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < 2:
            raise BandValidationError("knots must be a sequence of at least two (x, y) pairs")
        x, y = pts[:, 0], pts[:, 1]
        if np.any(np.diff(x) <= 0):
            raise BandValidationError("knot x-values must be strictly increasing")
        if np.any(np.diff(y) < 0):
            raise BandValidationError("knot y-values must be nondecreasing")
        if abs(x[0]) > _DOMAIN_SLACK or abs(x[-1] - 1) > _DOMAIN_SLACK:
            raise BandValidationError("knots must span x = 0 to x = 1")
        if y[0] < -_DOMAIN_SLACK or y[-1] > 1 + _DOMAIN_SLACK:
            raise BandValidationError("knot y-values must lie in [0, 1]")
        self.x = x
        self.y = np.clip(y, 0.0, 1.0)
        self.strictly_increasing = bool(np.all(np.diff(self.y) > 0))

    def _eval(self, x):
        return np.interp(x, self.x, self.y)

    def _inv(self, p):
        i = np.searchsorted(self.y, p, side="left")
        i = np.clip(i, 1, len(self.y) - 1)
        y0, y1 = self.y[i - 1], self.y[i]
        x0, x1 = self.x[i - 1], self.x[i]
        rise = y1 - y0
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.where(rise > 0, (p - y0) / rise, 1.0)
        out = x0 + np.clip(t, 0.0, 1.0) * (x1 - x0)
        return np.where(p <= self.y[0], self.x[0], np.where(p > self.y[-1], 1.0, out))

    def describe(self):
        return {"kind": self.kind, "knots": np.column_stack([self.x, self.y]).tolist()}


class FormulaCurve(CdfCurve):
    """Curve given by a named vectorized formula; inverse by bisection."""

    kind = "custom-closed-form"

    def __init__(self, name: str, func: Callable[[np.ndarray], np.ndarray], strictly_increasing: bool = True):
        self.name = name
        self._func = func
        self.strictly_increasing = strictly_increasing

    def _eval(self, x):
        return self._func(x)

    def describe(self):
        return {"kind": self.kind, "formula": self.name}


class PowerCurve(CdfCurve):
    """F(x) = scale * x**power, capped at 1."""

    kind = "custom-closed-form"

    def __init__(self, power: float, scale: float = 1.0):
        if power <= 0 or scale <= 0:
            raise ValueError("power and scale must be positive")
        self.power = float(power)
        self.scale = float(scale)
        self.strictly_increasing = scale <= 1.0

    def _eval(self, x):
        return np.minimum(self.scale * x**self.power, 1.0)

    def _inv(self, p):
        return np.minimum((p / self.scale) ** (1.0 / self.power), 1.0)

    def describe(self):
        return {"kind": self.kind, "formula": f"min({self.scale}*x**{self.power}, 1)"}


class ComposedCurve(CdfCurve):
    """``outer o center^-1``: a band envelope expressed on the quantile scale of ``center``."""

    kind = "composed"

    def __init__(self, outer: CdfCurve, center: CdfCurve):
        self.outer = outer
        self.center = center
        self.strictly_increasing = outer.strictly_increasing

    def _eval(self, p):
        return self.outer._eval(self.center._inv(p))

    def _inv(self, q):
        return self.center._eval(self.outer._inv(q))

    def left_limit(self, p):
        scalar = np.ndim(p) == 0
        theta = self.center.inverse(_as_unit(p, "p"))
        return _out(np.asarray(self.outer.left_limit(theta)), scalar)

    def describe(self):
        return {"kind": self.kind, "outer": self.outer.describe(), "center": self.center.describe()}


def to_piecewise_linear(curve: CdfCurve, n: int = 1024) -> PiecewiseLinearCurve:
    """Tabulate ``curve`` on ``n + 1`` equispaced knots."""
    x = np.linspace(0.0, 1.0, n + 1)
    y = np.maximum.accumulate(curve.evaluate(x))
    return PiecewiseLinearCurve(np.column_stack([x, y]))


@dataclass(frozen=True)
class DistributionBand:
    """Lower envelope, center and upper envelope of a set of CDFs on [0, 1].

    Attributes
    ----------
    lower, center, upper : CdfCurve
        ``F_l``, ``F*`` and ``F_h``.
    normalized : bool
        True when ``center`` is the identity.
    label : str
        Human-readable description used in logs and CLI output.
    relaxed : bool
        Envelopes may have flat stretches (epsilon family).
    """

    lower: CdfCurve
    center: CdfCurve
    upper: CdfCurve
    normalized: bool = False
    label: str = "custom"
    relaxed: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        grid = np.linspace(0.0, 1.0, VALIDATION_POINTS)
        lo, c, hi = self.lower(grid), self.center(grid), self.upper(grid)
        if np.any(lo > c + ORDER_TOL) or np.any(c > hi + ORDER_TOL):
            bad = grid[(lo > c + ORDER_TOL) | (c > hi + ORDER_TOL)][0]
            raise BandValidationError(f"band ordering F_l <= F* <= F_h fails near theta={bad:.6g}")

    # quantiles used throughout the solvers
    @property
    def lower_median(self) -> float:
        """``F_l^-1(1/2)``."""
        return self.lower.inverse(0.5)

    @property
    def upper_median(self) -> float:
        """``F_h^-1(1/2)``."""
        return self.upper.inverse(0.5)

    def symmetry_error(self) -> float:
        """Max of ``|F_l(1-p) - (1 - F_h(p))|`` over interior quantiles ``p``."""
        p = np.linspace(0.0, 1.0, VALIDATION_POINTS)[1:-1]
        c = self.center
        lo = self.lower(c.inverse(1.0 - p))
        hi = self.upper(c.inverse(p))
        return float(np.max(np.abs(lo - (1.0 - hi))))

    def is_symmetric(self, tol: float = SYMMETRY_TOL) -> bool:
        return self.symmetry_error() <= tol

    def require_normalized(self) -> None:
        if not self.normalized:
            raise BandValidationError("this operation needs a normalized band; call normalize_band first")

    def describe(self) -> dict[str, Any]:
        out = {"label": self.label, "normalized": self.normalized}
        out.update(self.meta)
        return out


def normalize_band(band: DistributionBand) -> DistributionBand:
    """Express the band on the quantile scale of its center.

    Returns ``band`` itself when it is already normalized. Otherwise the
    center becomes the identity and the envelopes become ``F_l o F*^-1`` and
    ``F_h o F*^-1``, evaluated exactly through the stored inverses.
    """
    if band.normalized:
        return band
    if isinstance(band.center, IdentityCurve):
        return DistributionBand(band.lower, band.center, band.upper, True, band.label, band.relaxed, dict(band.meta))
    if not band.center.strictly_increasing:
        raise BandValidationError("the center CDF must be strictly increasing to normalize")
    return DistributionBand(
        ComposedCurve(band.lower, band.center),
        IdentityCurve(),
        ComposedCurve(band.upper, band.center),
        True,
        f"normalized({band.label})",
        band.relaxed,
        dict(band.meta),
    )


def make_parametrized_band(family: str, param: float) -> DistributionBand:
    """Normalized band of one of the three parametric families.

    Parameters
    ----------
    family : {"contamination", "triangle", "epsilon"}
    param : float
        ``kappa`` in [0, 1), ``a`` in [1, inf) or ``eps`` in [0, 1/2).
    """
    param = float(param)
    if family == "contamination":
        lo, hi = ContaminationCurve(param, "lower"), ContaminationCurve(param, "upper")
    elif family == "triangle":
        lo, hi = TriangleCurve(param, "lower"), TriangleCurve(param, "upper")
    elif family == "epsilon":
        lo, hi = EpsilonCurve(param, "lower"), EpsilonCurve(param, "upper")
    else:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return DistributionBand(
        lo,
        IdentityCurve(),
        hi,
        normalized=True,
        label=f"{family}({param:g})",
        relaxed=family == "epsilon",
        meta={"family": family, "param": param},
    )


def zero_uncertainty_band() -> DistributionBand:
    """The degenerate band ``F_l = F* = F_h = Id``."""
    ident = IdentityCurve()
    return DistributionBand(ident, ident, ident, normalized=True, label="uniform", meta={"family": "uniform"})


def _mirror(upper_right, lower_right):
    """Extend right-half formulas to [0, 1] by ``F_h(x) = 1 - F_l(1-x)`` below 1/2."""

    def upper(x):
        return np.where(x >= 0.5, upper_right(x), 1.0 - lower_right(1.0 - x))

    def lower(x):
        return np.where(x >= 0.5, lower_right(x), 1.0 - upper_right(1.0 - x))

    return lower, upper


def _wave(x):
    return -4.0 * (np.sin(4.0 * np.pi * x) / 16.0 + x - 0.5) ** 2 + 1.0


def _wave_upper(x):
    return 0.8 * (x - 0.5) ** 2 + 0.8


def _wave_lower(x):
    fh = _wave_upper(x)
    return (1.0 - 2.0 * fh) * _wave(x) + fh


def _narrow_lower(x):
    return 1.1 * x - 0.1


def _narrow_upper(x):
    return 0.9 * x + 0.1


def _wide_lower(x):
    return 1.15 * x - 0.15


def _wide_upper(x):
    return 17.0 / 40.0 * np.maximum(2.0 * x - 1.0, 0.0) ** 0.1 + 23.0 / 40.0


def builtin_band(name: str) -> DistributionBand:
    """Named constructions with unusual equilibrium structure.

    ``multiple-equilibria``
        A band whose cursed equilibrium system has three solutions.
    ``nonmonotone-narrow`` / ``nonmonotone-wide``
        A nested pair where the wider band has the smaller symmetric threshold.
    """
    if name == "multiple-equilibria":
        lower, upper = _mirror(_wave_upper, _wave_lower)
    elif name == "nonmonotone-narrow":
        lower, upper = _mirror(_narrow_upper, _narrow_lower)
    elif name == "nonmonotone-wide":
        lower, upper = _mirror(_wide_upper, _wide_lower)
    else:
        raise ValueError(f"unknown built-in band {name!r}; expected one of {BUILTIN_BANDS}")
    return DistributionBand(
        FormulaCurve(f"{name}:lower", lower),
        IdentityCurve(),
        FormulaCurve(f"{name}:upper", upper),
        normalized=True,
        label=name,
        meta={"family": name},
    )


def _curve_from_json(desc) -> CdfCurve:
    if desc is None or desc == "identity" or desc == "uniform":
        return IdentityCurve()
    if isinstance(desc, list):
        return PiecewiseLinearCurve(desc)
    raise BandValidationError(f"cannot interpret curve specification {desc!r}")


def band_from_dict(doc: dict) -> DistributionBand:
    """Build a band from ``{"family": ..., "param": x}`` or ``{"custom": {...}}``.

    Custom bands list knots as ``[[x, y], ...]`` for ``lower``, ``center`` and
    ``upper``; a missing center means the identity. The result is normalized.
    """
    if not isinstance(doc, dict):
        raise BandValidationError("band document must be a JSON object")
    if "custom" in doc:
        desc = doc["custom"]
        try:
            lower = _curve_from_json(desc["lower"])
            upper = _curve_from_json(desc["upper"])
        except KeyError as exc:
            raise BandValidationError(f"custom band is missing {exc.args[0]!r}") from None
        center = _curve_from_json(desc.get("center"))
        band = DistributionBand(lower, center, upper, isinstance(center, IdentityCurve), "custom",
                                meta={"family": "custom"})
        return normalize_band(band)
    if "family" in doc:
        family = doc["family"]
        if family in BUILTIN_BANDS:
            return builtin_band(family)
        if family in ("uniform", "none"):
            return zero_uncertainty_band()
        if "param" not in doc:
            raise BandValidationError(f"family {family!r} needs a 'param'")
        return make_parametrized_band(family, doc["param"])
    raise BandValidationError("band document needs a 'family' or 'custom' key")


def load_band(path: str | Path) -> DistributionBand:
    """Read a band JSON file."""
    with open(path, encoding="utf-8") as fh:
        return band_from_dict(json.load(fh))
