"""Associated Laguerre polynomials and spherical harmonics with derivatives."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import lpmv

from conformal_qm.errors import DomainError, PoleProximityError

LAGUERRE_MAX_DEGREE = 60
HARMONIC_MAX_DEGREE = 8
POLE_MARGIN = 1e-6

FloatOrArray = float | NDArray[np.float64]


@dataclass(frozen=True)
class LaguerreEval:
    """L_n^(α)(x) with its first and second x-derivatives."""

    value: FloatOrArray
    derivative: FloatOrArray
    second: FloatOrArray


@dataclass(frozen=True)
class SphericalHarmonicEval:
    """Y_lk(θ, φ); the derivatives are None when they were not requested."""

    value: complex
    dtheta: complex | None = None
    dphi: complex | None = None


def _laguerre_value(n: int, alpha: float, x: FloatOrArray) -> FloatOrArray:
    if n < 0:
        return np.zeros_like(x) if isinstance(x, np.ndarray) else 0.0
    prev = np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
    if n == 0:
        return prev
    curr = 1.0 + alpha - x
    for k in range(1, n):
        prev, curr = curr, ((2 * k + 1 + alpha - x) * curr - (k + alpha) * prev) / (k + 1)
    return curr


def laguerre(n: int, alpha: float, x: ArrayLike) -> LaguerreEval:
    """Generalized Laguerre polynomial in the NIST convention.

    Evaluated by the upward three-term recurrence in n; the derivatives use
    d/dx L_n^(α) = -L_{n-1}^(α+1), applied twice for the second derivative.
    """
    if n < 0 or n > LAGUERRE_MAX_DEGREE:
        raise DomainError(f"Laguerre degree must be in [0, {LAGUERRE_MAX_DEGREE}], got {n}")
    if alpha <= -1:
        raise DomainError(f"Laguerre alpha must exceed -1, got {alpha}")
    xs = np.asarray(x, dtype=float)
    if np.any(xs < 0):
        raise DomainError("Laguerre argument must be non-negative")
    arg: FloatOrArray = xs if xs.ndim else float(xs)
    return LaguerreEval(
        value=_laguerre_value(n, alpha, arg),
        derivative=-_laguerre_value(n - 1, alpha + 1, arg),
        second=_laguerre_value(n - 2, alpha + 2, arg),
    )


def _legendre_norm(l: int, m: int) -> float:
    return math.sqrt((2 * l + 1) / (4 * math.pi) * math.factorial(l - m) / math.factorial(l + m))


def spherical_harmonic(
    l: int, k: int, theta: float, phi: float, *, derivatives: bool = False,
) -> SphericalHarmonicEval:
    """Orthonormal complex spherical harmonic with the Condon-Shortley phase.

    The θ-derivative comes from the associated Legendre recurrence
    (1 - x²) dP_l^m/dx = (l + m) P_{l-1}^m - l x P_l^m, which divides by sin θ.
    """
    if l < 0 or l > HARMONIC_MAX_DEGREE:
        raise DomainError(f"harmonic degree must be in [0, {HARMONIC_MAX_DEGREE}], got {l}")
    if abs(k) > l:
        raise DomainError(f"|k| must not exceed l, got l={l}, k={k}")
    if derivatives and (theta < POLE_MARGIN or theta > math.pi - POLE_MARGIN):
        raise PoleProximityError(f"theta={theta} is within {POLE_MARGIN} rad of a pole")

    m = abs(k)
    ct, st = math.cos(theta), math.sin(theta)
    norm = _legendre_norm(l, m)
    p_lm = float(lpmv(m, l, ct))
    positive = norm * p_lm * cmath.exp(1j * m * phi)
    # Y_{l,-m} = (-1)^m conj(Y_{l,m})
    sign = (-1) ** m if k < 0 else 1
    value = sign * positive.conjugate() if k < 0 else positive
    if not derivatives:
        return SphericalHarmonicEval(value=value)

    if l == 0:
        return SphericalHarmonicEval(value=value, dtheta=0j, dphi=0j)
    p_prev = float(lpmv(m, l - 1, ct)) if l - 1 >= m else 0.0
    dp_dtheta = (l * ct * p_lm - (l + m) * p_prev) / st
    dpositive = norm * dp_dtheta * cmath.exp(1j * m * phi)
    dtheta = sign * dpositive.conjugate() if k < 0 else dpositive
    return SphericalHarmonicEval(value=value, dtheta=dtheta, dphi=1j * k * value)
