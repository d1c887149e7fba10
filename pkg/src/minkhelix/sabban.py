"""Unit-speed curves on the de Sitter sphere S^2_1 and the hyperbolic plane H^2_0.

Along such a curve gamma with t = gamma' and p = gamma ^ t the
pseudo-Sabban frame (gamma, t, p) moves by

    timelike on S^2_1:   t' =  k_g p + gamma,  p' =  k_g t
    spacelike on S^2_1:  t' = -k_g p - gamma,  p' = -k_g t
    spacelike on H^2_0:  t' =  k_g p + gamma,  p' = -k_g t

with geodesic curvature k_g = det(gamma, t, t'). Integrating these
equations from an initial frame synthesizes a spherical curve with a
prescribed k_g(s).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .curves import CurveEvaluator, DerivativeQuality, SampleGrid
from .errors import BadInitialFrame, LightlikeTangent, NotSpherical, UnsupportedCase
from .lorentz import CausalCharacter, causal_character, det3, lorentz_cross, minkowski_dot
from .report import FAIL, PASS, VerificationReport

__all__ = [
    "SurfaceKind",
    "SabbanFrame",
    "quadratic_form",
    "surface_membership",
    "validate_unit_speed_spherical",
    "sabban_frame",
    "geodesic_curvature",
    "sabban_ode_residual",
    "frame_coefficients",
    "expected_gram",
    "default_initial_frame",
    "SynthesizedCurve",
    "synthesize_spherical_curve",
]

S, T = CausalCharacter.SPACELIKE, CausalCharacter.TIMELIKE


class SurfaceKind(enum.Enum):
    S12 = "S12"
    H02 = "H02"
    NEITHER = "Neither"

    def __str__(self):
        return self.value


# (c_tp, c_tg, c_pt): t' = c_tp k_g p + c_tg gamma, p' = c_pt k_g t
_COEFFS = {
    (SurfaceKind.S12, T): (1.0, 1.0, 1.0),
    (SurfaceKind.S12, S): (-1.0, -1.0, -1.0),
    (SurfaceKind.H02, S): (1.0, 1.0, -1.0),
}

_DEFAULT_INIT = {
    (SurfaceKind.S12, S): ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
    (SurfaceKind.S12, T): ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
    (SurfaceKind.H02, S): ((0.0, 0.0, 1.0), (1.0, 0.0, 0.0)),
}


def _surface(x) -> SurfaceKind:
    if isinstance(x, SurfaceKind):
        return x
    key = str(x).upper()
    return SurfaceKind.NEITHER if key == "NEITHER" else SurfaceKind(key)


def _character(x) -> CausalCharacter:
    return x if isinstance(x, CausalCharacter) else CausalCharacter(str(x).lower())


def frame_coefficients(surface, char) -> tuple[float, float, float]:
    key = (_surface(surface), _character(char))
    if key not in _COEFFS:
        raise UnsupportedCase(f"no pseudo-Sabban system for a {key[1]} curve on {key[0]}")
    return _COEFFS[key]


def expected_gram(surface, char) -> np.ndarray:
    """diag(<gamma,gamma>, <t,t>, <p,p>) for the given case."""
    surface, char = _surface(surface), _character(char)
    frame_coefficients(surface, char)
    g = 1.0 if surface is SurfaceKind.S12 else -1.0
    tt = float(char.sign)
    # <p, p> = <gamma, t>^2 - <gamma, gamma><t, t>
    return np.diag([g, tt, -g * tt])


def quadratic_form(x) -> np.ndarray | float:
    return minkowski_dot(x, x)


def surface_membership(point, tol: float = 1e-8) -> SurfaceKind:
    q = quadratic_form(point)
    if abs(q - 1.0) <= tol:
        return SurfaceKind.S12
    if abs(q + 1.0) <= tol:
        return SurfaceKind.H02
    return SurfaceKind.NEITHER


@dataclass(frozen=True)
class SabbanFrame:
    gamma: np.ndarray
    t: np.ndarray
    p: np.ndarray
    k_g: float
    surface: SurfaceKind
    gamma_char: CausalCharacter

    @property
    def rows(self) -> np.ndarray:
        return np.stack([self.gamma, self.t, self.p])

    def gram(self) -> np.ndarray:
        R = self.rows
        return R @ np.diag([1.0, 1.0, -1.0]) @ R.T


def _default_tol(curve: CurveEvaluator) -> float:
    return 1e-8 if curve.quality is DerivativeQuality.ANALYTIC else 1e-6


def validate_unit_speed_spherical(gamma: CurveEvaluator, grid: SampleGrid,
                                  tol: float | None = None) -> VerificationReport:
    """Check that gamma stays on one of S^2_1, H^2_0 with unit pseudo-speed.

    The report's values are the speed deviations | ||gamma'|| - 1 |; metrics
    carry the surface, the tangent character and the worst deviations.
    """
    if tol is None:
        tol = _default_tol(gamma)
    s = grid.nodes
    pts = gamma.eval(s, 0)
    vel = gamma.eval(s, 1)
    q = quadratic_form(pts)
    kinds = {surface_membership(x, tol) for x in pts}
    qv = quadratic_form(vel)
    speed_dev = np.abs(np.sqrt(np.abs(qv)) - 1.0)
    signs = set(np.sign(qv).astype(int).tolist())
    surface = kinds.pop() if len(kinds) == 1 else SurfaceKind.NEITHER
    if len(signs) == 1 and 0 not in signs:
        tangent = S if signs == {1} else T
    else:
        tangent = CausalCharacter.LIGHTLIKE
    membership_dev = float(np.min([np.max(np.abs(q - 1.0)), np.max(np.abs(q + 1.0))]))
    ok = surface is not SurfaceKind.NEITHER and float(speed_dev.max()) <= tol \
        and tangent is not CausalCharacter.LIGHTLIKE
    causes = []
    if surface is SurfaceKind.NEITHER:
        causes.append("NotSpherical")
    if float(speed_dev.max()) > tol:
        causes.append("NotUnitSpeed")
    if tangent is CausalCharacter.LIGHTLIKE:
        causes.append("MixedOrLightlikeTangent")
    return VerificationReport(
        subject=gamma.name or "gamma",
        grid=grid,
        metric_name="speed_deviation",
        values=speed_dev,
        verdict=PASS if ok else FAIL,
        cause=None if ok else ",".join(causes),
        details=f"surface={surface} tangent={tangent}",
        metrics={
            "surface": str(surface),
            "tangent": str(tangent),
            "max_membership_deviation": membership_dev,
            "max_speed_deviation": float(speed_dev.max()),
            "quadratic_form_range": [float(q.min()), float(q.max())],
        },
    )


def sabban_frame(gamma: CurveEvaluator, s: float, tol: float | None = None) -> SabbanFrame:
    """Pseudo-Sabban frame and geodesic curvature k_g = det(gamma, t, t')."""
    if tol is None:
        tol = _default_tol(gamma)
    g = gamma.eval(s, 0)
    t = gamma.eval(s, 1)
    dt = gamma.eval(s, 2)
    surface = surface_membership(g, tol)
    if surface is SurfaceKind.NEITHER:
        raise NotSpherical(f"gamma({s}) = {g} is on neither S12 nor H02 (Q = {quadratic_form(g):.6g})")
    char = causal_character(t)
    if char is CausalCharacter.LIGHTLIKE:
        raise LightlikeTangent(f"gamma' is lightlike at s={s}")
    return SabbanFrame(gamma=g, t=t, p=lorentz_cross(g, t), k_g=float(det3(g, t, dt)),
                       surface=surface, gamma_char=char)


def geodesic_curvature(gamma: CurveEvaluator, s) -> np.ndarray | float:
    """Vectorised det(gamma, t, t') without the membership checks."""
    return det3(gamma.eval(s, 0), gamma.eval(s, 1), gamma.eval(s, 2))


def _system_rhs(rows: np.ndarray, kg, coeffs) -> np.ndarray:
    c_tp, c_tg, c_pt = coeffs
    g, t, p = rows[..., 0, :], rows[..., 1, :], rows[..., 2, :]
    kg = np.asarray(kg, dtype=float)[..., None]
    return np.stack([t, c_tp * kg * p + c_tg * g, c_pt * kg * t], axis=-2)


def sabban_ode_residual(gamma: CurveEvaluator, s: float, h: float = 1e-4) -> float:
    """Max Euclidean residual of the frame equations by central differences."""
    fr = sabban_frame(gamma, s)
    coeffs = frame_coefficients(fr.surface, fr.gamma_char)
    deriv = (sabban_frame(gamma, s + h).rows - sabban_frame(gamma, s - h).rows) / (2 * h)
    predicted = _system_rhs(fr.rows, fr.k_g, coeffs)
    return float(np.max(np.linalg.norm(deriv - predicted, axis=1)))


def default_initial_frame(surface, char) -> SabbanFrame:
    surface, char = _surface(surface), _character(char)
    frame_coefficients(surface, char)
    g, t = (np.array(v) for v in _DEFAULT_INIT[(surface, char)])
    return SabbanFrame(gamma=g, t=t, p=lorentz_cross(g, t), k_g=math.nan,
                       surface=surface, gamma_char=char)


def _as_profile(fn: Callable | float) -> Callable[[np.ndarray], np.ndarray]:
    if callable(fn):
        def prof(s):
            s = np.asarray(s, dtype=float)
            return np.broadcast_to(np.asarray(fn(s), dtype=float), s.shape).astype(float)
        return prof
    value = float(fn)
    return lambda s: np.full(np.shape(s), value)


def _central_derivative(fn, h=1e-4):
    return lambda s: (fn(s - 2 * h) - 8 * fn(s - h) + 8 * fn(s + h) - fn(s + 2 * h)) / (12 * h)


class SynthesizedCurve(CurveEvaluator):
    """Spherical curve obtained by RK4 integration of the frame equations.

    The full frame is stored at every integration node. Evaluation at an
    arbitrary s takes one partial RK4 step from the nearest node; derivatives
    come from the frame equations (t' and t'' in closed form), not from
    re-differencing samples.
    """

    def __init__(self, nodes, frames, surface, char, kg, dkg, step, name="synthesized"):
        super().__init__((nodes[0], nodes[-1]), DerivativeQuality.INTEGRATED, name)
        self.nodes = nodes
        self.frames = frames
        self.surface = surface
        self.char = char
        self.kg = kg
        self.dkg = dkg
        self.step = step
        self._coeffs = frame_coefficients(surface, char)

    def frame_at(self, s) -> np.ndarray:
        """(..., 3, 3) array of rows gamma, t, p (no domain check)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        idx = np.clip(np.searchsorted(self.nodes, s), 1, len(self.nodes) - 1)
        left = self.nodes[idx - 1]
        right = self.nodes[idx]
        idx = np.where(s - left <= right - s, idx - 1, idx)
        return _rk4_step(self.nodes[idx], self.frames[idx], s - self.nodes[idx],
                         self.kg, self._coeffs)

    def gram_drift(self) -> float:
        """Largest deviation of any Gram entry from its initial value over all nodes."""
        G = np.einsum("nij,j,nkj->nik", self.frames, np.array([1.0, 1.0, -1.0]), self.frames)
        return float(np.max(np.abs(G - expected_gram(self.surface, self.char))))

    def _eval(self, s, order):
        rows = self.frame_at(s)
        g, t, p = rows[:, 0], rows[:, 1], rows[:, 2]
        if order == 0:
            return g
        if order == 1:
            return t
        c_tp, c_tg, c_pt = self._coeffs
        kg = self.kg(s)[:, None]
        if order == 2:
            return c_tp * kg * p + c_tg * g
        dkg = self.dkg(s)[:, None]
        return c_tp * (dkg * p + kg * c_pt * kg * t) + c_tg * t


def _rk4_step(s0, y0, h, kg, coeffs):
    """One classic RK4 step of size h (arrays broadcast over leading axis)."""
    h = np.asarray(h, dtype=float)
    hh = h[..., None, None]
    k1 = _system_rhs(y0, kg(s0), coeffs)
    k2 = _system_rhs(y0 + 0.5 * hh * k1, kg(s0 + 0.5 * h), coeffs)
    k3 = _system_rhs(y0 + 0.5 * hh * k2, kg(s0 + 0.5 * h), coeffs)
    k4 = _system_rhs(y0 + hh * k3, kg(s0 + h), coeffs)
    return y0 + hh / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _integrate(s_start, s_end, y0, step, kg, coeffs):
    """Fixed-step RK4 from s_start to s_end (either direction); returns nodes, frames."""
    span = s_end - s_start
    if span == 0:
        return np.array([s_start]), y0[None]
    n = max(1, int(math.ceil(abs(span) / step - 1e-9)))
    h = span / n
    nodes = s_start + h * np.arange(n + 1)
    nodes[-1] = s_end
    frames = np.empty((n + 1, 3, 3))
    frames[0] = y0
    y = y0
    for i in range(n):
        y = _rk4_step(np.array(nodes[i]), y, np.array(h), kg, coeffs)
        frames[i + 1] = y
    return nodes, frames


def synthesize_spherical_curve(surface, char, kg_profile, grid: SampleGrid,
                               init: SabbanFrame | tuple | None = None,
                               step: float = 1e-3, s_init: float | None = None,
                               kg_derivative: Callable | None = None,
                               name: str = "synthesized") -> SynthesizedCurve:
    """Integrate the pseudo-Sabban equations for a prescribed k_g(s).

    Parameters
    ----------
    surface, char : SurfaceKind, CausalCharacter (or their string values)
        One of (S12, timelike), (S12, spacelike), (H02, spacelike).
    kg_profile : callable or float
        Geodesic curvature as a function of arc length.
    grid : SampleGrid
        Output domain [s0, s1].
    init : SabbanFrame or (gamma, t), optional
        Frame at ``s_init``; p is recomputed as gamma ^ t. Defaults per case
        are listed in ``_DEFAULT_INIT``.
    step : float
        Upper bound on the RK4 step.
    s_init : float, optional
        Parameter of the initial frame; 0 when inside the grid, else s0.
    kg_derivative : callable, optional
        dk_g/ds for third derivatives; 5-point differences of the profile
        are used when omitted.
    """
    surface, char = _surface(surface), _character(char)
    coeffs = frame_coefficients(surface, char)
    if step <= 0:
        raise ValueError("step must be positive")
    if init is None:
        init = default_initial_frame(surface, char)
    if isinstance(init, SabbanFrame):
        g0, t0 = init.gamma, init.t
    else:
        g0, t0 = init
    g0 = np.asarray(g0, dtype=float)
    t0 = np.asarray(t0, dtype=float)
    y0 = np.stack([g0, t0, lorentz_cross(g0, t0)])
    gram = y0 @ np.diag([1.0, 1.0, -1.0]) @ y0.T
    err = float(np.max(np.abs(gram - expected_gram(surface, char))))
    if err > 1e-9:
        raise BadInitialFrame(
            f"initial frame Gram matrix deviates by {err:.3e} from {np.diag(expected_gram(surface, char))}")
    if s_init is None:
        s_init = 0.0 if grid.s0 <= 0.0 <= grid.s1 else grid.s0
    if not grid.s0 <= s_init <= grid.s1:
        raise ValueError("s_init must lie inside the grid")
    kg = _as_profile(kg_profile)
    dkg = _as_profile(kg_derivative) if kg_derivative is not None else _central_derivative(kg)
    back_nodes, back_frames = _integrate(s_init, grid.s0, y0, step, kg, coeffs)
    fwd_nodes, fwd_frames = _integrate(s_init, grid.s1, y0, step, kg, coeffs)
    nodes = np.concatenate([back_nodes[::-1], fwd_nodes[1:]])
    frames = np.concatenate([back_frames[::-1], fwd_frames[1:]])
    return SynthesizedCurve(nodes, frames, surface, char, kg, dkg, step, name=name)
