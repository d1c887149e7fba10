"""Curves built from a spherical generator by alpha = b * int(e^{int k} gamma) + a.

With F(s) = e^{int k ds} (the integrating factor) the construction gives

    alpha'   = b F gamma
    alpha''  = b F (k gamma + gamma')
    alpha''' = b F ((k^2 + k') gamma + 2 k gamma' + gamma'')

and, for b > 0, kappa = 1 / (b F), tau = k_g / (b F), nu = b F.

Integrating-factor families:

* ``tanh``: k = k_g tanh(k_g (s - b1)), F = b2 cosh(k_g (s - b1)).
* ``tan``:  F = b2 cos(k_g (s - b1)), i.e. k = -k_g tan(k_g (s - b1)).
  This is the solution of k' + k^2 = -k_g^2 (the sphericity condition for
  timelike constructions).
* ``zero``: F = b2.
* ``custom``: F = b2 exp(int_{s_origin}^s k) by composite Simpson.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .curves import POLE_MARGIN, CurveEvaluator, SampleGrid
from .errors import DomainError, GridTooCoarse, PoleProximity

__all__ = [
    "Family",
    "Branch",
    "KProfile",
    "KgProfile",
    "ConstructionParams",
    "ConstructedCurve",
    "integrating_factor",
    "construct_alpha",
    "predicted_invariants",
    "kg_slant_profile",
    "cumulative_integral",
    "profile_from_dict",
    "slant_profile_from_dict",
]

MAX_QUAD_STEP = 1e-3
MAX_GRID_STEP = 1e-2
_GL_X, _GL_W = np.polynomial.legendre.leggauss(6)


class Family(enum.Enum):
    TANH = "tanh"
    TAN = "tan"
    ZERO = "zero"
    CUSTOM = "custom"


class Branch(enum.Enum):
    PLUS = "plus"    # k_g^2 = u^2 / (1 + u^2)
    MINUS = "minus"  # k_g^2 = u^2 / (1 - u^2)


def cumulative_integral(f: Callable[[np.ndarray], np.ndarray], s0: float, s1: float,
                        max_step: float = MAX_QUAD_STEP) -> tuple[np.ndarray, np.ndarray]:
    """Nodes s0 .. s1 (even number of uniform intervals, step <= max_step)
    and the cumulative Simpson integral of f from s0 at each node.

    ``f`` may be vector valued (returning ``(n, d)``); integration runs
    along the first axis.
    """
    n = max(2, int(math.ceil(abs(s1 - s0) / max_step - 1e-9)))
    n += n % 2
    lo, hi = min(s0, s1), max(s0, s1)
    nodes = np.linspace(lo, hi, n + 1)
    y = np.asarray(f(nodes), dtype=float)
    cum = cumulative_simpson(y, x=nodes, axis=0, initial=0.0)
    if s1 < s0:
        # integral from s0 (the right end) down to each node
        return nodes[::-1], (cum - cum[-1])[::-1]
    return nodes, cum


def _gauss(f, a, b):
    """6-point Gauss-Legendre on [a_i, b_i] for arrays of short intervals."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    total = None
    for x, w in zip(_GL_X, _GL_W):
        term = w * np.asarray(f(mid + half * x), dtype=float)
        total = term if total is None else total + term
    return (half.reshape(half.shape + (1,) * (total.ndim - half.ndim))) * total


@dataclass(frozen=True)
class KProfile:
    """The function k(s) of the construction, through its integrating factor.

    ``k`` (and optionally its derivative ``dk``) are only used by the
    ``custom`` family.
    """

    family: Family = Family.ZERO
    kg: float = 0.0
    b1: float = 0.0
    b2: float = 1.0
    k: Callable | None = field(default=None, compare=False)
    dk: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.b2 <= 0:
            raise ValueError("b2 must be positive")
        if self.family is Family.CUSTOM and self.k is None:
            raise ValueError("custom profile needs k")
        if self.family is Family.TAN and self.kg == 0:
            raise ValueError("tan family needs k_g != 0")

    @property
    def closed_factor(self) -> Callable | None:
        """F(s) in closed form, or None for the custom family."""
        if self.family is Family.CUSTOM:
            return None
        return lambda s: self.factor_closed(s)

    def check_domain(self, s) -> None:
        if self.family is Family.TAN:
            arg = np.abs(self.kg * (np.asarray(s, dtype=float) - self.b1))
            if np.any(arg >= math.pi / 2 - POLE_MARGIN):
                raise PoleProximity(
                    f"|k_g (s - b1)| reaches {float(np.max(arg)):.4f} >= pi/2 - {POLE_MARGIN}")

    def domain(self) -> tuple[float, float]:
        if self.family is Family.TAN:
            half = (math.pi / 2 - POLE_MARGIN) / abs(self.kg)
            return self.b1 - half, self.b1 + half
        return -math.inf, math.inf

    def factor_closed(self, s):
        s = np.asarray(s, dtype=float)
        x = self.kg * (s - self.b1)
        if self.family is Family.TANH:
            return self.b2 * np.cosh(x)
        if self.family is Family.TAN:
            self.check_domain(s)
            return self.b2 * np.cos(x)
        if self.family is Family.ZERO:
            return np.full_like(s, self.b2)
        raise ValueError("custom family has no closed-form factor")

    def k_of(self, s):
        s = np.asarray(s, dtype=float)
        x = self.kg * (s - self.b1)
        if self.family is Family.TANH:
            return self.kg * np.tanh(x)
        if self.family is Family.TAN:
            return -self.kg * np.tan(x)
        if self.family is Family.ZERO:
            return np.zeros_like(s)
        return np.broadcast_to(np.asarray(self.k(s), dtype=float), s.shape).astype(float)

    def dk_of(self, s):
        s = np.asarray(s, dtype=float)
        x = self.kg * (s - self.b1)
        if self.family is Family.TANH:
            return self.kg ** 2 / np.cosh(x) ** 2
        if self.family is Family.TAN:
            return -self.kg ** 2 / np.cos(x) ** 2
        if self.family is Family.ZERO:
            return np.zeros_like(s)
        if self.dk is not None:
            return np.broadcast_to(np.asarray(self.dk(s), dtype=float), s.shape).astype(float)
        h = 1e-4
        return (self.k_of(s - 2 * h) - 8 * self.k_of(s - h) + 8 * self.k_of(s + h)
                - self.k_of(s + 2 * h)) / (12 * h)


@dataclass(frozen=True)
class ConstructionParams:
    """Scale b, translation a and the lower limit of the cumulative integrals.

    ``s_origin=None`` means: 0 if the grid contains it, else the grid start.
    """

    b: float = 1.0
    a: tuple = (0.0, 0.0, 0.0)
    s_origin: float | None = None

    def __post_init__(self):
        if self.b == 0 or not math.isfinite(self.b):
            raise ValueError("b must be finite and nonzero")
        a = tuple(float(x) for x in self.a)
        if len(a) != 3:
            raise ValueError("a must have three components")
        object.__setattr__(self, "a", a)

    def origin_for(self, s0: float, s1: float) -> float:
        if self.s_origin is not None:
            return float(self.s_origin)
        return 0.0 if s0 <= 0.0 <= s1 else s0


@dataclass(frozen=True)
class KgProfile:
    """k_g(s) = sign * |u| / sqrt(1 +- u^2) with u = m s + n."""

    m: float
    n: float
    branch: Branch = Branch.PLUS
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "branch", Branch(self.branch))
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def u(self, s):
        return self.m * np.asarray(s, dtype=float) + self.n

    def _check(self, u):
        if self.branch is Branch.MINUS and np.any(np.abs(u) >= 1 - 1e-6):
            raise DomainError(f"minus branch needs |m s + n| < 1, got {float(np.max(np.abs(u)))}")

    def __call__(self, s):
        u = self.u(s)
        self._check(u)
        denom = 1 + u ** 2 if self.branch is Branch.PLUS else 1 - u ** 2
        out = self.sign * np.abs(u) / np.sqrt(denom)
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, s):
        u = self.u(s)
        self._check(u)
        power = (1 + u ** 2) if self.branch is Branch.PLUS else (1 - u ** 2)
        out = self.sign * np.sign(u) * self.m / power ** 1.5
        return float(out) if np.ndim(out) == 0 else out

    def domain(self) -> tuple[float, float]:
        """Parameter interval on which the minus branch is defined."""
        if self.branch is Branch.PLUS or self.m == 0:
            return -math.inf, math.inf
        lim = 1 - 1e-6
        ends = sorted(((-lim - self.n) / self.m, (lim - self.n) / self.m))
        return ends[0], ends[1]


def kg_slant_profile(p: KgProfile, s):
    return p(s)


def integrating_factor(profile: KProfile, params: ConstructionParams, s):
    """e^{int k ds}, normalised by the family's b2 constant."""
    if profile.family is not Family.CUSTOM:
        return profile.factor_closed(s)
    s_arr = np.atleast_1d(np.asarray(s, dtype=float))
    origin = 0.0 if params.s_origin is None else float(params.s_origin)
    out = np.empty_like(s_arr)
    for i, si in enumerate(s_arr):
        if si == origin:
            out[i] = 0.0
            continue
        n = max(2, int(math.ceil(abs(si - origin) / MAX_QUAD_STEP)))
        n += n % 2
        x = np.linspace(origin, si, n + 1)
        out[i] = simpson(profile.k_of(x), x=x)
    res = profile.b2 * np.exp(out)
    return float(res[0]) if np.ndim(s) == 0 else res


class ConstructedCurve(CurveEvaluator):
    """alpha(s) = b int_{s_origin}^s F(x) gamma(x) dx + a.

    Positions at fine nodes (step <= 1e-3) come from cumulative composite
    Simpson; between nodes a 6-point Gauss-Legendre rule on the remaining
    sub-interval is added. Derivatives use the closed forms in the module
    docstring, taking gamma's own derivatives.
    """

    def __init__(self, gamma: CurveEvaluator, profile: KProfile, params: ConstructionParams,
                 domain: tuple[float, float], max_step: float = MAX_QUAD_STEP, name: str = "alpha"):
        super().__init__(domain, gamma.quality, name)
        self.gamma = gamma
        self.profile = profile
        self.params = params
        self.b = float(params.b)
        self.a = np.asarray(params.a, dtype=float)
        lo, hi = self.domain
        self.s_origin = params.origin_for(lo, hi)
        if not lo <= self.s_origin <= hi:
            raise DomainError(f"s_origin={self.s_origin} outside [{lo}, {hi}]")
        self._log_nodes = None
        if profile.family is Family.CUSTOM:
            self._log_nodes = self._two_sided(lambda x: profile.k_of(x)[:, None], max_step)
        self._pos_nodes = self._two_sided(self.velocity, max_step)

    def _two_sided(self, f, max_step):
        lo, hi = self.domain
        parts_s, parts_v = [], []
        if self.s_origin > lo:
            s, v = cumulative_integral(f, self.s_origin, lo, max_step)
            parts_s.append(s[::-1][:-1])
            parts_v.append(v[::-1][:-1])
        if hi > self.s_origin:
            s, v = cumulative_integral(f, self.s_origin, hi, max_step)
            parts_s.append(s)
            parts_v.append(v)
        else:
            parts_s.append(np.array([self.s_origin]))
            parts_v.append(np.zeros((1, np.asarray(f(np.array([self.s_origin]))).shape[-1])))
        return np.concatenate(parts_s), np.concatenate(parts_v)

    @staticmethod
    def _from_nodes(nodes_vals, f, s):
        nodes, vals = nodes_vals
        idx = np.clip(np.searchsorted(nodes, s), 1, len(nodes) - 1)
        idx = np.where(s - nodes[idx - 1] <= nodes[idx] - s, idx - 1, idx)
        return vals[idx] + _gauss(f, nodes[idx], s)

    def factor(self, s):
        s = np.asarray(s, dtype=float)
        if self._log_nodes is None:
            return self.profile.factor_closed(s)
        logf = self._from_nodes(self._log_nodes, lambda x: self.profile.k_of(x)[..., None], s)
        return self.profile.b2 * np.exp(logf[..., 0])

    def velocity(self, s):
        s = np.asarray(s, dtype=float)
        return self.b * self.factor(s)[..., None] * self.gamma.eval(s, 0)

    def _eval(self, s, order):
        if order == 0:
            return self.a + self._from_nodes(self._pos_nodes, self.velocity, s)
        bF = (self.b * self.factor(s))[:, None]
        g0 = self.gamma.eval(s, 0)
        if order == 1:
            return bF * g0
        k = self.profile.k_of(s)[:, None]
        g1 = self.gamma.eval(s, 1)
        if order == 2:
            return bF * (k * g0 + g1)
        dk = self.profile.dk_of(s)[:, None]
        g2 = self.gamma.eval(s, 2)
        return bF * ((k ** 2 + dk) * g0 + 2 * k * g1 + g2)


def construct_alpha(gamma: CurveEvaluator, profile: KProfile, params: ConstructionParams,
                    grid: SampleGrid, max_step: float = MAX_QUAD_STEP,
                    name: str = "alpha") -> ConstructedCurve:
    """Build alpha over [grid.s0, grid.s1].

    Raises
    ------
    GridTooCoarse
        If the output grid spacing exceeds 1e-2.
    PoleProximity
        If a tan-family factor would come within the pole margin.
    DomainError
        If the generator does not cover the grid.
    """
    if grid.spacing > MAX_GRID_STEP * (1 + 1e-12):
        raise GridTooCoarse(f"grid spacing {grid.spacing:.3g} exceeds {MAX_GRID_STEP}")
    lo, hi = gamma.domain
    if grid.s0 < lo or grid.s1 > hi:
        raise DomainError(f"grid [{grid.s0}, {grid.s1}] not inside generator domain [{lo}, {hi}]")
    profile.check_domain(np.array([grid.s0, grid.s1]))
    return ConstructedCurve(gamma, profile, params, (grid.s0, grid.s1), max_step=max_step, name=name)


def predicted_invariants(profile: KProfile, k_g_of_s, params: ConstructionParams, s,
                         factor: Callable | None = None):
    """(kappa, tau, nu) = (1/(bF), k_g/(bF), bF); requires b > 0."""
    if params.b <= 0:
        raise ValueError("predicted invariants assume b > 0 (kappa > 0)")
    F = factor(s) if factor is not None else integrating_factor(profile, params, s)
    bF = params.b * np.asarray(F, dtype=float)
    kg = k_g_of_s(s) if callable(k_g_of_s) else k_g_of_s
    kappa, tau, nu = 1.0 / bF, np.asarray(kg, dtype=float) / bF, bF
    if np.ndim(kappa) == 0:
        return float(kappa), float(tau), float(nu)
    return kappa, tau, nu


def profile_from_dict(d: dict) -> KProfile:
    """``{"family": "tanh|tan|zero|custom", "kg": .., "b1": .., "b2": ..}``.

    Custom profiles from JSON take a constant ``"k"`` value.
    """
    family = Family(str(d.get("family", "zero")).lower())
    k = None
    if family is Family.CUSTOM:
        if "k" not in d:
            raise ValueError("custom profile JSON needs a constant 'k'")
        kval = float(d["k"])
        k = lambda s: np.full(np.shape(s), kval)
    return KProfile(family=family, kg=float(d.get("kg", 0.0)), b1=float(d.get("b1", 0.0)),
                    b2=float(d.get("b2", 1.0)), k=k)


def slant_profile_from_dict(d: dict) -> KgProfile:
    """``{"slant": {"m": .., "n": .., "branch": "plus|minus", "sign": 1}}`` or the inner object."""
    inner = d.get("slant", d)
    return KgProfile(m=float(inner["m"]), n=float(inner["n"]),
                     branch=Branch(str(inner.get("branch", "plus")).lower()),
                     sign=int(inner.get("sign", 1)))
