"""Curve representations with derivatives up to order 3.

Every curve is a :class:`CurveEvaluator`. Concrete flavours:

* :class:`AnalyticCurve` -- closed-form position and derivatives (the
  builtin catalogue).
* :class:`FiniteDifferenceCurve` -- position function only; derivatives by
  5-point central differences.
* :class:`SplineCurve` -- tabulated samples interpolated by a not-a-knot
  cubic spline per component, derivatives from local polynomial fits.

Other modules add derived curves (ODE-synthesized generators, constructed
curves) by subclassing :class:`CurveEvaluator`.
"""

from __future__ import annotations

import enum
import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, FormatError, OrderError, UnknownCurve

__all__ = [
    "DerivativeQuality",
    "SampleGrid",
    "CurveEvaluator",
    "AnalyticCurve",
    "FiniteDifferenceCurve",
    "SplineCurve",
    "evaluate",
    "builtin_curve",
    "tabulated_curve",
    "BUILTIN_NAMES",
    "POLE_MARGIN",
    "curve_from_spec",
    "load_curve_spec",
]

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
# keep tan-profile factors this far (in radians) from their poles
POLE_MARGIN = 0.05
DEFAULT_DOMAIN = (-3.0, 3.0)
MIN_TABULATED_NODES = 8


class DerivativeQuality(enum.Enum):
    ANALYTIC = "analytic"
    FINITE_DIFFERENCE = "finite_difference"
    SPLINE = "spline"
    # fixed-step ODE output (synthesized generators and curves built on them)
    INTEGRATED = "integrated"


@dataclass(frozen=True)
class SampleGrid:
    """Uniform grid ``s_i = s0 + i (s1 - s0) / (count - 1)``."""

    s0: float
    s1: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.s0) and math.isfinite(self.s1)):
            raise ValueError("grid bounds must be finite")
        if not self.s0 < self.s1:
            raise ValueError(f"need s0 < s1, got {self.s0} >= {self.s1}")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError("count must be an integer >= 2")

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.s0, self.s1, int(self.count))

    @property
    def spacing(self) -> float:
        return (self.s1 - self.s0) / (self.count - 1)

    def to_dict(self) -> dict:
        return {"s0": self.s0, "s1": self.s1, "count": int(self.count)}


class CurveEvaluator:
    """Map ``s -> point`` with derivatives of order 0 to 3.

    Subclasses implement :meth:`_eval` on a 1-D array of parameters already
    checked against the domain.
    """

    kind = "derived"

    def __init__(self, domain: tuple[float, float], quality: DerivativeQuality,
                 name: str = ""):
        lo, hi = float(domain[0]), float(domain[1])
        if not lo < hi:
            raise ValueError(f"empty domain [{lo}, {hi}]")
        self.domain = (lo, hi)
        self.quality = quality
        self.name = name

    def __repr__(self) -> str:
        return (f"{type(self).__name__}(name={self.name!r}, "
                f"domain={self.domain}, quality={self.quality.value})")

    @property
    def tolerance_tier(self) -> float:
        """Default constancy tolerance for verdicts on this curve."""
        return 1e-6 if self.quality is DerivativeQuality.ANALYTIC else 1e-3

    def valid_domain(self, order: int = 0) -> tuple[float, float]:
        return self.domain

    def eval(self, s, order: int = 0) -> np.ndarray:
        """Order-th derivative at ``s`` (scalar -> (3,), 1-D array -> (n, 3))."""
        if isinstance(order, bool) or int(order) != order or not 0 <= order <= 3:
            raise OrderError(f"derivative order must be 0..3, got {order!r}")
        order = int(order)
        s_arr = np.asarray(s, dtype=float)
        scalar = s_arr.ndim == 0
        s_arr = np.atleast_1d(s_arr)
        lo, hi = self.valid_domain(order)
        if not np.all(np.isfinite(s_arr)):
            raise DomainError("non-finite parameter")
        # tiny slack so grid endpoints produced by linspace are accepted
        slack = 1e-12 * max(1.0, abs(lo), abs(hi))
        if np.any(s_arr < lo - slack) or np.any(s_arr > hi + slack):
            bad = s_arr[(s_arr < lo - slack) | (s_arr > hi + slack)][0]
            raise DomainError(f"s={bad} outside domain [{lo}, {hi}] of {self.name or self}")
        out = self._eval(np.clip(s_arr, lo, hi), order)
        return out[0] if scalar else out

    def _eval(self, s: np.ndarray, order: int) -> np.ndarray:
        raise NotImplementedError

    def sample(self, grid: SampleGrid, order: int = 0) -> np.ndarray:
        return self.eval(grid.nodes, order)


def evaluate(curve: CurveEvaluator, s, order: int = 0) -> np.ndarray:
    return curve.eval(s, order)


class AnalyticCurve(CurveEvaluator):
    """Curve given by closed forms for position and derivatives 1..3.

    ``derivs[k]`` maps a 1-D parameter array to an ``(n, 3)`` array.
    """

    kind = "builtin"

    def __init__(self, name: str, derivs: Sequence[Callable[[np.ndarray], np.ndarray]],
                 domain: tuple[float, float] = DEFAULT_DOMAIN, params: dict | None = None):
        if len(derivs) != 4:
            raise ValueError("need closed forms for orders 0..3")
        super().__init__(domain, DerivativeQuality.ANALYTIC, name)
        self._derivs = tuple(derivs)
        self.params = dict(params or {})

    def _eval(self, s, order):
        return np.asarray(self._derivs[order](s), dtype=float)


class FiniteDifferenceCurve(CurveEvaluator):
    """Derivatives of a position function by 5-point central differences.

    Order 1 uses h = max(1e-5, 1e-5 |s|) with one Richardson level (steps h
    and 2h). Order 2 uses h = max(1e-3, 1e-3 |s|) and order 3 uses
    h = max(1e-3, 1e-3 |s|) with one Richardson level: at smaller steps
    rounding error dominates (about 5e-6 |f| for order 2 at h = 1e-5), and
    the bare 5-point third-derivative stencil is only second order.
    """

    _BASE_STEP = {0: 0.0, 1: 1e-5, 2: 1e-3, 3: 1e-3}

    def __init__(self, position: Callable[[np.ndarray], np.ndarray],
                 domain: tuple[float, float], name: str = ""):
        super().__init__(domain, DerivativeQuality.FINITE_DIFFERENCE, name)
        self._f = position

    @classmethod
    def from_curve(cls, curve: CurveEvaluator) -> "FiniteDifferenceCurve":
        return cls(lambda s: curve.eval(s, 0), curve.domain, name=f"fd({curve.name})")

    def _step(self, s, order):
        base = self._BASE_STEP[order]
        return np.maximum(base, base * np.abs(s))

    def valid_domain(self, order=0):
        lo, hi = self.domain
        # shrink by the stencil reach (4h) computed at the endpoint magnitudes
        base = max(self._BASE_STEP.values())
        margin = 4 * base * max(1.0, abs(lo), abs(hi))
        return lo + margin, hi - margin

    def _f2(self, s):
        return np.asarray(self._f(s), dtype=float).reshape(len(s), 3)

    def _d1(self, s, h):
        f = self._f2
        hh = h[:, None]
        return (f(s - 2 * h) - 8 * f(s - h) + 8 * f(s + h) - f(s + 2 * h)) / (12 * hh)

    def _eval(self, s, order):
        f = self._f2
        if order == 0:
            return f(s)
        h = self._step(s, order)
        hh = h[:, None]
        if order == 1:
            d_h = self._d1(s, h)
            d_2h = self._d1(s, 2 * h)
            return d_h + (d_h - d_2h) / 15.0
        if order == 2:
            return (-f(s - 2 * h) + 16 * f(s - h) - 30 * f(s) + 16 * f(s + h)
                    - f(s + 2 * h)) / (12 * hh ** 2)
        d_h = self._d3(s, h)
        return (4 * d_h - self._d3(s, 2 * h)) / 3.0

    def _d3(self, s, h):
        f = self._f2
        hh = h[:, None]
        return (-f(s - 2 * h) + 2 * f(s - h) - 2 * f(s + h) + f(s + 2 * h)) / (2 * hh ** 3)


class SplineCurve(CurveEvaluator):
    """Not-a-knot cubic spline through tabulated samples.

    Positions come from the spline. A cubic spline's third derivative is
    piecewise constant, and differentiating rounded samples three times
    amplifies the rounding by ~1/h^3, so by default orders 1-3 come from a
    least-squares polynomial of degree ``LOCAL_DEGREE`` fitted to the
    ``2 * LOCAL_HALF_WIDTH + 1`` nodes around the evaluation point. Pass
    ``local_fit=False`` for plain spline derivatives.
    """

    kind = "tabulated"
    LOCAL_HALF_WIDTH = 40
    LOCAL_DEGREE = 8

    def __init__(self, grid: np.ndarray, points: np.ndarray, name: str = "tabulated",
                 local_fit: bool = True):
        super().__init__((grid[0], grid[-1]), DerivativeQuality.SPLINE, name)
        self.grid = grid
        self.points = points
        self.local_fit = local_fit
        self._spline = CubicSpline(grid, points, bc_type="not-a-knot", axis=0)
        if local_fit:
            self._prepare_local_fits()

    @property
    def derivative_window(self) -> float:
        """Typical half-width (in s) of the local fits."""
        if not self.local_fit:
            return float(np.max(np.diff(self.grid)))
        return float(np.max(self._half))

    def _prepare_local_fits(self):
        g, n = self.grid, len(self.grid)
        size = min(n, 2 * self.LOCAL_HALF_WIDTH + 1)
        self._size = size
        self._deg = min(self.LOCAL_DEGREE, size - 1)
        starts = np.arange(n - size + 1)
        idx = starts[:, None] + np.arange(size)
        lo, hi = g[idx[:, 0]], g[idx[:, -1]]
        self._center = 0.5 * (lo + hi)
        self._half = 0.5 * (hi - lo)
        t = (g[idx] - self._center[:, None]) / self._half[:, None]
        V = t[..., None] ** np.arange(self._deg + 1)
        # (windows, degree + 1, 3) monomial coefficients in t
        self._coef = np.linalg.pinv(V) @ self.points[idx]

    def _local(self, s, order):
        n, size = len(self.grid), self._size
        nearest = np.clip(np.searchsorted(self.grid, s), 1, n - 1)
        left = self.grid[nearest - 1]
        nearest = np.where(s - left < self.grid[nearest] - s, nearest - 1, nearest)
        j = np.clip(nearest - size // 2, 0, n - size)
        t = (s - self._center[j]) / self._half[j]
        out = np.zeros((len(s), 3))
        for m in range(order, self._deg + 1):
            fall = math.factorial(m) / math.factorial(m - order)
            out += (fall * t ** (m - order))[:, None] * self._coef[j, m]
        return out / self._half[j][:, None] ** order

    def _eval(self, s, order):
        if order > 0 and self.local_fit:
            return self._local(s, order)
        out = np.asarray(self._spline(s, nu=order), dtype=float)
        if order == 0:
            # return stored samples bit-for-bit at the knots
            idx = np.clip(np.searchsorted(self.grid, s), 0, len(self.grid) - 1)
            hit = self.grid[idx] == s
            out[hit] = self.points[idx[hit]]
        return out


def tabulated_curve(grid, points, name: str = "tabulated", local_fit: bool = True) -> SplineCurve:
    """Build a spline evaluator from samples; validates shape and monotonicity."""
    try:
        g = np.asarray(grid, dtype=float)
        p = np.asarray(points, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"cannot read tabulated data: {exc}") from None
    if g.ndim != 1:
        raise FormatError("grid must be one-dimensional")
    if p.ndim != 2 or p.shape[1] != 3:
        raise FormatError(f"points must be an (n, 3) array, got shape {p.shape}")
    if len(g) != len(p):
        raise FormatError(f"grid has {len(g)} nodes but {len(p)} points were given")
    if len(g) < MIN_TABULATED_NODES:
        raise FormatError(f"need at least {MIN_TABULATED_NODES} nodes, got {len(g)}")
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(p))):
        raise FormatError("tabulated data contains NaN or Inf")
    if np.any(np.diff(g) <= 0):
        raise FormatError("grid must be strictly increasing")
    return SplineCurve(g, p, name=name, local_fit=local_fit)


# ---------------------------------------------------------------------------
# builtin catalogue

def _cos_d(k, x):
    return (np.cos(x), -np.sin(x), -np.cos(x), np.sin(x))[k]


def _sin_d(k, x):
    return (np.sin(x), np.cos(x), -np.sin(x), -np.cos(x))[k]


def _cosh_d(k, x):
    return np.cosh(x) if k % 2 == 0 else np.sinh(x)


def _sinh_d(k, x):
    return np.sinh(x) if k % 2 == 0 else np.cosh(x)


def _const(k, c, s):
    return np.full_like(s, c if k == 0 else 0.0)


def _stack(*cols):
    return np.stack(cols, axis=-1)


def _product_antiderivative(factor_d, gamma_d, position):
    """Closed forms for a curve whose velocity is factor(s) * gamma(s).

    ``factor_d(k, s)`` and ``gamma_d(k, s)`` give k-th derivatives; the
    curve's own position is supplied separately.
    """
    def d1(s):
        return factor_d(0, s)[:, None] * gamma_d(0, s)

    def d2(s):
        return factor_d(1, s)[:, None] * gamma_d(0, s) + factor_d(0, s)[:, None] * gamma_d(1, s)

    def d3(s):
        return (factor_d(2, s)[:, None] * gamma_d(0, s)
                + 2 * factor_d(1, s)[:, None] * gamma_d(1, s)
                + factor_d(0, s)[:, None] * gamma_d(2, s))

    return (position, d1, d2, d3)


def _ex1_gamma(k, s):
    return _stack(_cos_d(k, s), _sin_d(k, s), _const(k, SQRT2, s))


def _ex2_gamma(k, s):
    w = 1.0 / SQRT2
    return _stack(SQRT2 * w ** k * _cos_d(k, w * s), SQRT2 * w ** k * _sin_d(k, w * s),
                  _const(k, 1.0, s))


def _ex3_gamma(k, s):
    return _stack(SQRT3 ** k * _cosh_d(k, SQRT3 * s) / SQRT3,
                  _const(k, SQRT2 / SQRT3, s),
                  SQRT3 ** k * _sinh_d(k, SQRT3 * s) / SQRT3)


def _ex1_alpha_pos(s):
    r = SQRT2 * s
    return _stack(-2 * np.cos(r) * np.sin(s) + 2 * SQRT2 * np.cos(s) * np.sin(r),
                  2 * np.cos(s) * np.cos(r) + 2 * SQRT2 * np.sin(s) * np.sin(r),
                  2 * np.sin(r))


def _ex2_alpha_corrected_pos(s):
    x = s / SQRT2
    return _stack(2 * np.cosh(x) * np.sin(x) + 2 * np.cos(x) * np.sinh(x),
                  2 * np.sinh(x) * np.sin(x) - 2 * np.cos(x) * np.cosh(x),
                  2 * SQRT2 * np.sinh(x))


def _ex3_alpha_pos(s):
    r2, r3 = SQRT2 * s, SQRT3 * s
    c = math.sqrt(2.0 / 3.0)
    return _stack(-2 * c * np.cosh(r3) * np.sinh(r2) + 2 * np.cosh(r2) * np.sinh(r3),
                  2 * np.sinh(r2) / SQRT3,
                  2 * np.cosh(r2) * np.cosh(r3) - 2 * c * np.sinh(r2) * np.sinh(r3))


def _ex2_alpha_printed(k, s):
    # second component as printed; its derivatives come from that formula itself
    x = s / SQRT2
    w = 1.0 / SQRT2
    corrected = _product_antiderivative(
        lambda j, t: 2 * w ** j * _cosh_d(j, w * t), _ex2_gamma, _ex2_alpha_corrected_pos)[k](s)
    c, sn, ch, sh = np.cos(x), np.sin(x), np.cosh(x), np.sinh(x)
    second = (-2 * (c * ch + sn * sh), -4 * c * sh, -4 * (c * ch - sn * sh),
              8 * sn * ch)[k]
    out = corrected.copy()
    out[:, 1] = w ** k * second
    return out


def _tan_domain(kg: float) -> tuple[float, float]:
    half = (math.pi / 2 - POLE_MARGIN) / kg
    return -half, half


def _ex1_alpha():
    factor = lambda k, s: 2 * SQRT2 ** k * _cos_d(k, SQRT2 * s)
    return _product_antiderivative(factor, _ex1_gamma, _ex1_alpha_pos), _tan_domain(SQRT2)


def _ex2_alpha_corrected():
    w = 1.0 / SQRT2
    factor = lambda k, s: 2 * w ** k * _cosh_d(k, w * s)
    return _product_antiderivative(factor, _ex2_gamma, _ex2_alpha_corrected_pos), DEFAULT_DOMAIN


def _ex3_alpha():
    factor = lambda k, s: 2 * SQRT2 ** k * _cosh_d(k, SQRT2 * s)
    return _product_antiderivative(factor, _ex3_gamma, _ex3_alpha_pos), DEFAULT_DOMAIN


def _from_components(fn):
    return tuple((lambda s, k=k: fn(k, s)) for k in range(4)), DEFAULT_DOMAIN


_CATALOG: dict[str, Callable[[], tuple]] = {
    "example1_gamma": lambda: _from_components(_ex1_gamma),
    "example2_gamma": lambda: _from_components(_ex2_gamma),
    "example3_gamma": lambda: _from_components(_ex3_gamma),
    "example1_alpha": _ex1_alpha,
    "example2_alpha_corrected": _ex2_alpha_corrected,
    "example2_alpha_printed": lambda: _from_components(_ex2_alpha_printed),
    "example3_alpha": _ex3_alpha,
    "hyperbola2": lambda: _from_components(
        lambda k, s: _stack(2 * _sinh_d(k, s), _const(k, 0.0, s), 2 * _cosh_d(k, s))),
    "s12_circle": lambda: _from_components(
        lambda k, s: _stack(_cos_d(k, s), _sin_d(k, s), _const(k, 0.0, s))),
    "h02_geodesic": lambda: _from_components(
        lambda k, s: _stack(_sinh_d(k, s), _const(k, 0.0, s), _cosh_d(k, s))),
}

BUILTIN_NAMES = tuple(_CATALOG)


def builtin_curve(name: str, params: dict | None = None) -> AnalyticCurve:
    """Look up a closed-form curve by name.

    ``params`` may carry ``"domain": [lo, hi]`` to narrow the default
    domain ([-3, 3], or pole-clipped for curves with a cos factor).
    """
    try:
        factory = _CATALOG[name]
    except KeyError:
        raise UnknownCurve(f"unknown builtin curve {name!r}; known: {', '.join(BUILTIN_NAMES)}") from None
    params = dict(params or {})
    derivs, domain = factory()
    if "domain" in params:
        lo, hi = map(float, params["domain"])
        if lo < domain[0] or hi > domain[1]:
            raise DomainError(f"requested domain [{lo}, {hi}] exceeds [{domain[0]}, {domain[1]}]")
        domain = (lo, hi)
    return AnalyticCurve(name, derivs, domain=domain, params=params)


# ---------------------------------------------------------------------------
# JSON curve specs

def curve_from_spec(spec: dict) -> CurveEvaluator:
    """Build a curve from ``{"kind": "builtin", ...}`` or ``{"kind": "tabulated", ...}``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise FormatError("curve spec must be an object with a 'kind' key")
    kind = spec["kind"]
    if kind == "builtin":
        if "name" not in spec:
            raise FormatError("builtin curve spec needs 'name'")
        return builtin_curve(spec["name"], spec.get("params"))
    if kind == "tabulated":
        if "s" not in spec or "points" not in spec:
            raise FormatError("tabulated curve spec needs 's' and 'points'")
        return tabulated_curve(spec["s"], spec["points"], name=spec.get("name", "tabulated"))
    raise FormatError(f"unknown curve kind {kind!r}")


def _read_csv_curve(path: str) -> SplineCurve:
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names or ()
    missing = [c for c in ("s", "x1", "x2", "x3") if c not in names]
    if missing:
        raise FormatError(f"{path}: missing columns {missing}")
    pts = np.column_stack([data["x1"], data["x2"], data["x3"]])
    return tabulated_curve(data["s"], pts, name=os.path.basename(path))


def load_curve_spec(source: str) -> CurveEvaluator:
    """Curve from a JSON file, a CSV file (s,x1,x2,x3 columns), inline JSON,
    or a bare builtin name."""
    if source in _CATALOG:
        return builtin_curve(source)
    if os.path.exists(source):
        if source.lower().endswith(".csv"):
            return _read_csv_curve(source)
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source
    try:
        spec = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"cannot parse curve spec {source!r}: {exc}") from None
    return curve_from_spec(spec)
