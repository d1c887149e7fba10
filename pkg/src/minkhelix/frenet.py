"""Arbitrary-speed Frenet apparatus of non-lightlike curves in R^3_1.

Curvature, torsion and speed are

    kappa = ||a' ^ a''|| / ||a'||^3
    tau   = det(a', a'', a''') / ||a' ^ a''||^2
    nu    = sqrt(|<a', a'>|)

with the Lorentzian cross product and pseudo-norm. The frame derivative
obeys one of three systems, selected by the causal characters of T and N:

    timelike T:              T' = k v N,  N' =  k v T + t v B,  B' = -t v N
    spacelike T, spacelike N: T' = k v N,  N' = -k v T + t v B,  B' =  t v N
    spacelike T, timelike N:  T' = k v N,  N' =  k v T + t v B,  B' =  t v N

(k = kappa, t = tau, v = nu).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import CurveEvaluator
from .errors import LightlikeTangent, VanishingCurvature
from .lorentz import CausalCharacter, causal_character, lorentz_cross, minkowski_dot

__all__ = [
    "FrenetApparatus",
    "CurvatureData",
    "KAPPA_THRESHOLD",
    "invariants",
    "frenet_apparatus",
    "system_matrix",
    "frame_ode_residual",
]

# VanishingCurvature when ||a' ^ a''|| <= KAPPA_THRESHOLD * nu^3
KAPPA_THRESHOLD = 1e-9
LIGHTLIKE_TOL = 1e-9


@dataclass(frozen=True)
class FrenetApparatus:
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray
    kappa: float
    tau: float
    nu: float
    curve_character: CausalCharacter
    normal_character: CausalCharacter

    @property
    def frame(self) -> np.ndarray:
        """Rows T, N, B."""
        return np.stack([self.T, self.N, self.B])

    @property
    def system(self) -> int:
        """Which Frenet system governs the frame: 1, 2 or 3 (see module doc)."""
        return system_number(self.curve_character, self.normal_character)


@dataclass(frozen=True)
class CurvatureData:
    """Vectorised kappa, tau, nu with per-node validity flags.

    Nodes where the tangent is lightlike or kappa vanishes carry NaN in the
    affected entries and ``False`` in ``ok``.
    """

    s: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    nu: np.ndarray
    tangent_sign: np.ndarray  # +1 spacelike, -1 timelike, 0 lightlike
    normal_sign: np.ndarray
    lightlike: np.ndarray
    flat: np.ndarray

    @property
    def ok(self) -> np.ndarray:
        return ~(self.lightlike | self.flat)


def system_number(curve_character: CausalCharacter, normal_character: CausalCharacter) -> int:
    if curve_character is CausalCharacter.TIMELIKE:
        return 1
    if curve_character is CausalCharacter.SPACELIKE:
        if normal_character is CausalCharacter.SPACELIKE:
            return 2
        if normal_character is CausalCharacter.TIMELIKE:
            return 3
    raise ValueError(f"no Frenet system for ({curve_character}, {normal_character})")


def system_matrix(system: int, kappa: float, tau: float, nu: float) -> np.ndarray:
    """Coefficient matrix M with (T', N', B')^T = M (T, N, B)^T."""
    kv, tv = kappa * nu, tau * nu
    if system == 1:
        return np.array([[0.0, kv, 0.0], [kv, 0.0, tv], [0.0, -tv, 0.0]])
    if system == 2:
        return np.array([[0.0, kv, 0.0], [-kv, 0.0, tv], [0.0, tv, 0.0]])
    if system == 3:
        return np.array([[0.0, kv, 0.0], [kv, 0.0, tv], [0.0, tv, 0.0]])
    raise ValueError(f"system must be 1, 2 or 3, got {system}")


def _tangent_normal(d1, d2):
    """T, the unnormalised normal direction T' and the speed, vectorised."""
    q11 = minkowski_dot(d1, d1)
    eps = np.sign(q11)
    nu = np.sqrt(np.abs(q11))
    q12 = minkowski_dot(d1, d2)
    T = d1 / nu[..., None]
    # derivative of a'/nu with nu' = eps <a', a''> / nu
    dT = d2 / nu[..., None] - (eps * q12 / nu ** 3)[..., None] * d1
    return T, dT, nu, q11


def invariants(curve: CurveEvaluator, s) -> CurvatureData:
    """kappa, tau, nu and causal signs at every parameter in ``s``.

    Does not raise for degenerate nodes; see :class:`CurvatureData`.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    d1, d2, d3 = (curve.eval(s, k) for k in (1, 2, 3))
    with np.errstate(divide="ignore", invalid="ignore"):
        q11 = minkowski_dot(d1, d1)
        e_scale = np.maximum(1.0, np.einsum("ij,ij->i", d1, d1))
        lightlike = np.abs(q11) <= LIGHTLIKE_TOL * e_scale
        nu = np.sqrt(np.abs(q11))
        c = lorentz_cross(d1, d2)
        cn2 = minkowski_dot(c, c)
        cn = np.sqrt(np.abs(cn2))
        flat = lightlike | (cn <= KAPPA_THRESHOLD * nu ** 3)
        kappa = cn / nu ** 3
        tau = np.einsum("ij,ij->i", c * np.array([1.0, 1.0, -1.0]), d3) / np.abs(cn2)
        _, dT, _, _ = _tangent_normal(d1, d2)
        # lightlike nodes give NaN here; they are flagged below anyway
        dT = np.nan_to_num(dT, nan=0.0, posinf=0.0, neginf=0.0)
        qn = minkowski_dot(dT, dT)
        tangent_sign = np.where(lightlike, 0, np.sign(q11)).astype(int)
        normal_sign = np.where(flat, 0, np.sign(qn)).astype(int)
    kappa = np.where(lightlike, np.nan, kappa)
    tau = np.where(flat, np.nan, tau)
    nu = np.where(lightlike, np.nan, nu)
    return CurvatureData(s, kappa, tau, nu, tangent_sign, normal_sign, lightlike, flat)


def frenet_apparatus(curve: CurveEvaluator, s: float) -> FrenetApparatus:
    """Full Frenet apparatus at a single parameter value.

    B is +-(T ^ N) normalised; the sign is the one that makes the governing
    system's N' row hold with the computed tau. Only the B-component of N'
    distinguishes the two candidates, and it is available in closed form,
    <N', B0> = <a''', B0> / (kappa nu^2).

    Raises
    ------
    LightlikeTangent
        If <a', a'> lies inside the lightlike band.
    VanishingCurvature
        If ||a' ^ a''|| <= 1e-9 nu^3.
    """
    s = float(s)
    d1, d2, d3 = (curve.eval(s, k) for k in (1, 2, 3))
    q11 = minkowski_dot(d1, d1)
    if abs(q11) <= LIGHTLIKE_TOL * max(1.0, float(d1 @ d1)):
        raise LightlikeTangent(f"tangent is lightlike at s={s} (<a',a'> = {q11:.3e})")
    T, dT, nu, _ = _tangent_normal(d1, d2)
    c = lorentz_cross(d1, d2)
    cn2 = minkowski_dot(c, c)
    cn = np.sqrt(abs(cn2))
    if cn <= KAPPA_THRESHOLD * nu ** 3:
        raise VanishingCurvature(f"curvature vanishes at s={s}")
    kappa = cn / nu ** 3
    tau = float(minkowski_dot(c, d3) / abs(cn2))
    N = dT / np.sqrt(abs(minkowski_dot(dT, dT)))
    curve_char = causal_character(T, tol=1e-6)
    normal_char = causal_character(N, tol=1e-6)
    B0 = lorentz_cross(T, N)
    eps_b = np.sign(minkowski_dot(B0, B0))
    B0 = B0 / np.sqrt(abs(minkowski_dot(B0, B0)))
    dn_b = minkowski_dot(d3, B0) / (kappa * nu ** 2)
    # residual of the N' row along B0 for each candidate sign
    res = {sgn: abs(dn_b - tau * nu * sgn * eps_b) for sgn in (eps_b, -eps_b)}
    sign = min(res, key=lambda k: (res[k], k != eps_b))
    return FrenetApparatus(T=T, N=N, B=sign * B0, kappa=float(kappa), tau=tau, nu=float(nu),
                           curve_character=curve_char, normal_character=normal_char)


def frame_ode_residual(curve: CurveEvaluator, s: float, h: float = 1e-4) -> float:
    """Self-consistency of the frame with its governing Frenet system.

    Max over the rows T, N, B of the Euclidean norm of
    ``(F(s+h) - F(s-h)) / 2h - M(s) F(s)``.
    """
    fa = frenet_apparatus(curve, s)
    plus = frenet_apparatus(curve, s + h).frame
    minus = frenet_apparatus(curve, s - h).frame
    deriv = (plus - minus) / (2 * h)
    predicted = system_matrix(fa.system, fa.kappa, fa.tau, fa.nu) @ fa.frame
    return float(np.max(np.linalg.norm(deriv - predicted, axis=1)))
