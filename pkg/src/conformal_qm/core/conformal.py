"""Isometric conformal map between (x_i, t) and complex (z_i, s).

The map keeps positions and shifts time by an imaginary, position dependent
amount, s = t - i(ħ/E)(r/b)^λ. It is bound to a single energy eigenvalue E.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
from numpy.typing import ArrayLike, NDArray

from conformal_qm.core.eigenstates import Eigenstate, transformed_radial
from conformal_qm.core.specfun import spherical_harmonic
from conformal_qm.core.units import System
from conformal_qm.errors import (
    InconsistentEventError,
    InvalidInputError,
    SingularityError,
    UnsupportedSystemError,
)

logger = logging.getLogger(__name__)

EVENT_TOL = 1e-12


@dataclass(frozen=True)
class MapParams:
    """Inputs of the map family: energy, length scale, index and ħ."""

    E: float
    b: float
    lam: float
    hbar: float

    def __post_init__(self) -> None:
        if self.E == 0:
            raise InvalidInputError("map energy E must be nonzero (the map divides by E)")
        if not self.b > 0:
            raise InvalidInputError(f"map length b must be positive, got {self.b}")
        if not self.lam > 0:
            raise InvalidInputError(f"map index lambda must be positive, got {self.lam}")
        if not self.hbar > 0:
            raise InvalidInputError(f"hbar must be positive, got {self.hbar}")

    @classmethod
    def for_state(cls, state: Eigenstate) -> MapParams:
        scales = state.scales
        return cls(E=state.energy, b=scales.b, lam=scales.lam, hbar=scales.hbar)

    def shift(self, r: float) -> float:
        """(ħ/E)(r/b)^λ; minus this is Im s on the unconjugated branch."""
        return (self.hbar / self.E) * (r / self.b) ** self.lam


def free_field_params(E: float, hbar: float) -> MapParams:
    """The e → 0 limit, emulated by b → ∞, where the map reduces to s = t."""
    return MapParams(E=E, b=math.inf, lam=1.0, hbar=hbar)


@dataclass(frozen=True)
class ComplexEvent:
    """A point (z_i, s), or (z_i*, s*) when ``conjugate`` is set."""

    z: tuple[float, float, float]
    s: complex
    conjugate: bool = False

    @property
    def r_z(self) -> float:
        return math.sqrt(sum(c * c for c in self.z))


def map_forward(x: ArrayLike, t: float, p: MapParams, *, conjugate: bool = False) -> ComplexEvent:
    """z = x, s = t - i(ħ/E)(r/b)^λ, or s* = t + i(ħ/E)(r/b)^λ."""
    xv = np.asarray(x, dtype=float)
    shift = p.shift(float(np.linalg.norm(xv)))
    s = complex(t, shift) if conjugate else complex(t, -shift)
    return ComplexEvent(z=(float(xv[0]), float(xv[1]), float(xv[2])), s=s, conjugate=conjugate)


def map_inverse(ev: ComplexEvent, p: MapParams) -> tuple[NDArray[np.float64], float]:
    """x = z, t = s + i(ħ/E)(r_z/b)^λ, or t = s* - i(ħ/E)(r_z/b)^λ."""
    shift = p.shift(ev.r_z)
    expected = shift if ev.conjugate else -shift
    if abs(ev.s.imag - expected) > EVENT_TOL * max(1.0, abs(expected)):
        raise InconsistentEventError(
            f"Im(s)={ev.s.imag} does not match the map's {expected} at r_z={ev.r_z}"
        )
    t = ev.s - 1j * shift if ev.conjugate else ev.s + 1j * shift
    return np.array(ev.z, dtype=float), t.real


def tau(s: complex, E: float, hbar: float) -> complex:
    """τ(s) = exp(-iEs/ħ)."""
    return cmath.exp(-1j * E * s / hbar)


def transformed_wavefunction(
    state: Eigenstate, ev: ComplexEvent, *, allow_extension: bool = False,
) -> complex:
    """ψ(z, s) = R̃(r_z) Y(θ_z, φ_z) τ(s).

    For hydrogen R̃ carries the extra exp(r_z/α₀) factor. The oscillator
    analogue exp((r_z/b)²) follows from the same substitution but is an
    extension of the quoted hydrogen form, so it must be requested explicitly.
    """
    if state.system is System.OSCILLATOR and not allow_extension:
        raise UnsupportedSystemError(
            "the transformed wavefunction is quoted for hydrogen only; "
            "pass allow_extension=True for the lambda=2 analogue"
        )
    if ev.conjugate:
        raise InvalidInputError("transformed wavefunction is defined on the unconjugated branch")
    r = ev.r_z
    if r <= state.r_min:
        raise SingularityError(f"r_z={r} is within r_min={state.r_min} of the origin")
    z = ev.z
    theta = math.atan2(math.hypot(z[0], z[1]), z[2])
    phi = math.atan2(z[1], z[0])
    y = spherical_harmonic(state.qn.l, state.qn.k, theta, phi).value
    return float(transformed_radial(state, r)) * y * tau(ev.s, state.energy, state.scales.hbar)


def shift_gradient(x: NDArray[np.float64], p: MapParams) -> NDArray[np.float64]:
    """b^-λ ∂r^λ/∂x_i = λ r^(λ-2) x_i / b^λ."""
    r = float(np.linalg.norm(x))
    return p.lam * r ** (p.lam - 2) * x / p.b**p.lam


def shift_divergence(r: float, p: MapParams) -> float:
    """b^-λ Σ_i ∂²r^λ/∂x_i² = λ(λ+1) r^(λ-2) / b^λ."""
    return p.lam * (p.lam + 1) * r ** (p.lam - 2) / p.b**p.lam


def shift_gradient_squared(r: float, p: MapParams) -> float:
    """b^-2λ Σ_i (∂r^λ/∂x_i)² = λ² r^(2λ-2) / b^(2λ)."""
    return p.lam**2 * r ** (2 * p.lam - 2) / p.b ** (2 * p.lam)


def chain_rule_dz(
    grad: ArrayLike, dt: complex, g: NDArray[np.float64], p: MapParams, *, conjugate: bool = False,
) -> NDArray[np.complex128]:
    """∂/∂x_i ± i(ħ/E) g_i ∂/∂t applied to a field's gradient and time derivative."""
    sign = -1.0 if conjugate else 1.0
    return np.asarray(grad, dtype=complex) + sign * 1j * (p.hbar / p.E) * g * dt


def coordinate_independence(
    x: ArrayLike, p: MapParams, E_sub: float | None = None, r_min: float = 0.0,
) -> NDArray[np.float64]:
    """|∂z_i/∂s|, |∂s/∂z_i|, |∂z_i*/∂s*|, |∂s*/∂z_i*| (each maximized over i).

    The chain-rule operators ∂/∂s = ∂/∂t and ∂/∂z_i = ∂/∂x_i ± i(ħ/E_sub) g_i ∂/∂t
    are applied to the coordinate functions z(x, t) and s(x, t). With E_sub equal
    to the map energy every entry vanishes.
    """
    xv = np.asarray(x, dtype=float)
    if float(np.linalg.norm(xv)) <= r_min:
        raise SingularityError(f"|x| must exceed r_min={r_min}")
    op = p if E_sub is None else replace(p, E=E_sub)
    g = shift_gradient(xv, p)

    # z_i = x_i: gradient e_i, no t dependence
    z_dt = np.zeros(3)
    # s = t - i(ħ/E)(r/b)^λ
    s_grad = -1j * (p.hbar / p.E) * g
    ds_dz = chain_rule_dz(s_grad, 1.0, g, op)
    dsc_dzc = chain_rule_dz(np.conj(s_grad), 1.0, g, op, conjugate=True)
    return np.array([
        float(np.abs(z_dt).max()),
        float(np.abs(ds_dz).max()),
        float(np.abs(z_dt).max()),
        float(np.abs(dsc_dzc).max()),
    ])


@dataclass(frozen=True)
class HolomorphyResidual:
    """Cauchy-Riemann residuals of τ on the complex time plane.

    ``analytic`` and ``pair_analytic`` are computed with exact rational
    multipliers; the finite-difference values are relative to the size of a
    single term.
    """

    analytic: float
    finite_difference: float
    pair_analytic: float
    pair_finite_difference: float


@dataclass(frozen=True)
class TauSurface:
    """τ(s) = g + ih on s = t + iy with y = -(ħ/α₀E) r."""

    E: float
    alpha0: float
    hbar: float

    def y(self, r: float) -> float:
        return -(self.hbar / (self.alpha0 * self.E)) * r

    def tau(self, s: complex) -> complex:
        return tau(s, self.E, self.hbar)

    def g(self, t: float, y: float) -> float:
        return self.tau(complex(t, y)).real

    def h(self, t: float, y: float) -> float:
        return self.tau(complex(t, y)).imag

    def tau_tr(self, t: float, r: float) -> complex:
        return self.tau(complex(t, self.y(r)))


def _exact_multipliers(p: MapParams) -> tuple[Fraction, Fraction, Fraction]:
    """(q, m_r, k) with q = E/ħ, m_r = ∂ ln τ/∂r and k = α₀²E²/ħ², all exact."""
    q = Fraction(p.E) / Fraction(p.hbar)
    a0 = Fraction(p.b)
    dy_dr = -1 / (a0 * q)
    return q, q * dy_dr, a0**2 * q**2


def cr_residual(p: MapParams, r: float, t: float, fd_step: float = 1e-4) -> HolomorphyResidual:
    """Residual of ∂²τ/∂t² + (α₀²E²/ħ²) ∂²τ/∂r² = 0 and of the first-order pair."""
    if p.lam != 1:
        raise UnsupportedSystemError("the Cauchy-Riemann check is defined for lambda = 1")
    if not math.isfinite(p.b):
        raise InvalidInputError("the Cauchy-Riemann check needs a finite length scale")
    if r <= 0:
        raise SingularityError(f"r must be positive, got {r}")
    surface = TauSurface(E=p.E, alpha0=p.b, hbar=p.hbar)
    value = surface.tau_tr(t, r)
    magnitude = abs(value)

    # ∂²τ/∂t² = -q²τ and ∂²τ/∂r² = m_r²τ
    q, m_r, k = _exact_multipliers(p)
    analytic = abs(float(-(q**2) + k * m_r**2)) * magnitude
    # τ_t = -iqτ, τ_y = qτ; pair coefficients m_t + i m_y and m_y - i m_t, as (re, im)
    m_t, m_y = (Fraction(0), -q), (q, Fraction(0))
    first = (m_t[0] - m_y[1], m_t[1] + m_y[0])
    second = (m_y[0] + m_t[1], m_y[1] - m_t[0])
    pair_analytic = max(abs(float(first[0])) + abs(float(first[1])),
                        abs(float(second[0])) + abs(float(second[1]))) * magnitude

    ht = fd_step * p.hbar / abs(p.E)
    hr = fd_step * p.b
    if r <= hr:
        raise SingularityError(f"r={r} is inside the finite-difference stencil ({hr})")
    d2t = (surface.tau_tr(t + ht, r) - 2 * value + surface.tau_tr(t - ht, r)) / ht**2
    d2r = (surface.tau_tr(t, r + hr) - 2 * value + surface.tau_tr(t, r - hr)) / hr**2
    term_scale = float(q**2) * magnitude
    fd = abs(d2t + float(k) * d2r) / term_scale

    y0 = surface.y(r)
    dg_dt = (surface.g(t + ht, y0) - surface.g(t - ht, y0)) / (2 * ht)
    dg_dy = (surface.g(t, y0 + ht) - surface.g(t, y0 - ht)) / (2 * ht)
    dh_dt = (surface.h(t + ht, y0) - surface.h(t - ht, y0)) / (2 * ht)
    dh_dy = (surface.h(t, y0 + ht) - surface.h(t, y0 - ht)) / (2 * ht)
    pair_fd = max(abs(dg_dt - dh_dy), abs(dg_dy + dh_dt)) / (abs(float(q)) * magnitude)
    logger.debug("CR residual at r=%g t=%g: analytic %g, fd %g", r, t, analytic, fd)
    return HolomorphyResidual(
        analytic=analytic, finite_difference=fd,
        pair_analytic=pair_analytic, pair_finite_difference=pair_fd,
    )
