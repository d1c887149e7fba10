"""Lorentzian algebra on R^3_1 with signature (+, +, -).

All functions accept array-likes of shape ``(3,)`` or ``(..., 3)`` and
operate along the last axis, so a batch of vectors can be processed in one
call.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import NonFiniteError

__all__ = [
    "CausalCharacter",
    "SIGNATURE",
    "as_vec3",
    "minkowski_dot",
    "pseudo_norm",
    "lorentz_cross",
    "det3",
    "causal_character",
    "causal_tolerance",
]

SIGNATURE = np.array([1.0, 1.0, -1.0])


class CausalCharacter(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"

    @property
    def sign(self) -> int:
        """+1 for spacelike, -1 for timelike, 0 for lightlike."""
        return {"spacelike": 1, "timelike": -1, "lightlike": 0}[self.value]

    def __str__(self) -> str:
        return self.value


def as_vec3(x) -> np.ndarray:
    """Convert to a float array with trailing dimension 3, rejecting NaN/Inf."""
    arr = np.asarray(x, dtype=float)
    if arr.shape[-1:] != (3,):
        raise ValueError(f"expected trailing dimension 3, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("vector has non-finite components")
    return arr


def minkowski_dot(x, y) -> np.ndarray | float:
    """Lorentzian inner product x1*y1 + x2*y2 - x3*y3."""
    x = as_vec3(x)
    y = as_vec3(y)
    out = x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] - x[..., 2] * y[..., 2]
    return float(out) if out.ndim == 0 else out


def pseudo_norm(x) -> np.ndarray | float:
    """sqrt(|<x, x>|)."""
    return np.sqrt(np.abs(minkowski_dot(x, x)))


def lorentz_cross(x, y) -> np.ndarray:
    """Lorentzian cross product.

    ``(x2 y3 - x3 y2, x3 y1 - x1 y3, x2 y1 - x1 y2)``; this is the Euclidean
    cross product with its third component negated.
    """
    x = as_vec3(x)
    y = as_vec3(y)
    return np.stack(
        [
            x[..., 1] * y[..., 2] - x[..., 2] * y[..., 1],
            x[..., 2] * y[..., 0] - x[..., 0] * y[..., 2],
            x[..., 1] * y[..., 0] - x[..., 0] * y[..., 1],
        ],
        axis=-1,
    )


def det3(x, y, z) -> np.ndarray | float:
    """Determinant of the 3x3 matrix with rows x, y, z."""
    x = as_vec3(x)
    y = as_vec3(y)
    z = as_vec3(z)
    out = (
        x[..., 0] * (y[..., 1] * z[..., 2] - y[..., 2] * z[..., 1])
        - x[..., 1] * (y[..., 0] * z[..., 2] - y[..., 2] * z[..., 0])
        + x[..., 2] * (y[..., 0] * z[..., 1] - y[..., 1] * z[..., 0])
    )
    return float(out) if out.ndim == 0 else out


def causal_tolerance(v) -> float:
    """Default lightlike band: 1e-9 * max(1, |v|^2) with the Euclidean norm."""
    v = as_vec3(v)
    return 1e-9 * max(1.0, float(np.dot(v, v)))


def causal_character(v, tol: float | None = None) -> CausalCharacter:
    """Classify a single vector as spacelike, timelike or lightlike.

    Values of ``<v, v>`` inside ``[-tol, tol]`` are lightlike. The zero vector
    therefore classifies as lightlike; callers that need the "v = 0 is
    spacelike" convention have to special-case it.
    """
    v = as_vec3(v)
    if v.shape != (3,):
        raise ValueError("causal_character takes a single vector")
    if tol is None:
        tol = causal_tolerance(v)
    if tol <= 0:
        raise ValueError("tol must be positive")
    q = minkowski_dot(v, v)
    if q > tol:
        return CausalCharacter.SPACELIKE
    if q < -tol:
        return CausalCharacter.TIMELIKE
    return CausalCharacter.LIGHTLIKE
