"""Hydrogen and isotropic-oscillator eigenstates with analytic derivative jets.

Radial functions share one form,

    u(r) = (κr)^l · exp(-β r^p) · L_N^(α)(γ r^p)

with p = 1 for hydrogen and p = 2 for the oscillator. The normalization is
always fixed by quadrature, never taken from a closed formula.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from fractions import Fraction
from typing import Iterator

import numpy as np
from numpy.typing import ArrayLike, NDArray

from conformal_qm.core.quadrature import QuadratureConfig, angular_grid, integrate_radial
from conformal_qm.core.specfun import (
    HARMONIC_MAX_DEGREE,
    LAGUERRE_MAX_DEGREE,
    FloatOrArray,
    laguerre,
    spherical_harmonic,
)
from conformal_qm.core.units import DerivedScales, System
from conformal_qm.errors import (
    InvalidInputError,
    InvalidQuantumNumbersError,
    SingularityError,
)

logger = logging.getLogger(__name__)

R_MIN_FACTOR = 1e-8


@dataclass(frozen=True)
class QuantumNumbers:
    """(n, l, k): n is the principal number for hydrogen, n_r for the oscillator."""

    n: int
    l: int
    k: int

    def validate(self, system: System) -> None:
        if system is System.HYDROGEN:
            if self.n < 1 or not 0 <= self.l <= self.n - 1 or abs(self.k) > self.l:
                raise InvalidQuantumNumbersError(
                    f"hydrogen needs n >= 1, 0 <= l <= n-1, |k| <= l; got {self.as_tuple()}"
                )
        elif self.n < 0 or self.l < 0 or abs(self.k) > self.l:
            raise InvalidQuantumNumbersError(
                f"oscillator needs n_r >= 0, l >= 0, |k| <= l; got {self.as_tuple()}"
            )
        if self.l > HARMONIC_MAX_DEGREE or self.n > LAGUERRE_MAX_DEGREE:
            raise InvalidQuantumNumbersError(f"quantum numbers {self.as_tuple()} exceed the supported degrees")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n, self.l, self.k)


@dataclass(frozen=True)
class RadialForm:
    """Parameters of u(r) = (κr)^l exp(-β r^p) L_N^(α)(γ r^p)."""

    l: int
    kappa: float
    beta: float
    p: int
    gamma: float
    degree: int
    alpha: float

    def value(self, r: FloatOrArray, shift: FloatOrArray = 0.0) -> FloatOrArray:
        """u(r)·exp(shift), with the shift folded into the exponent."""
        lag = laguerre(self.degree, self.alpha, self.gamma * r**self.p)
        return (self.kappa * r) ** self.l * np.exp(shift - self.beta * r**self.p) * lag.value

    def jet(self, r: FloatOrArray) -> tuple[FloatOrArray, FloatOrArray, FloatOrArray]:
        """(u, u', u'') by the product rule."""
        l, p, beta = self.l, self.p, self.beta
        poly = (self.kappa * r) ** l
        poly1 = l * poly / r
        poly2 = l * (l - 1) * poly / r**2

        expo = np.exp(-beta * r**p)
        e1 = -beta * p * r ** (p - 1)
        expo1 = e1 * expo
        expo2 = (e1**2 - beta * p * (p - 1) * r ** (p - 2)) * expo

        dx = self.gamma * p * r ** (p - 1)
        d2x = self.gamma * p * (p - 1) * r ** (p - 2)
        lag = laguerre(self.degree, self.alpha, self.gamma * r**p)
        lag0 = lag.value
        lag1 = lag.derivative * dx
        lag2 = lag.second * dx**2 + lag.derivative * d2x

        u = poly * expo * lag0
        u1 = poly1 * expo * lag0 + poly * expo1 * lag0 + poly * expo * lag1
        u2 = (poly2 * expo * lag0 + poly * expo2 * lag0 + poly * expo * lag2
              + 2.0 * (poly1 * expo1 * lag0 + poly1 * expo * lag1 + poly * expo1 * lag1))
        return u, u1, u2


@dataclass(frozen=True)
class Eigenstate:
    """An energy eigenstate of hydrogen or the isotropic oscillator."""

    system: System
    qn: QuantumNumbers
    energy: float
    scales: DerivedScales
    radial_norm: float

    @property
    def label(self) -> str:
        return f"{self.system.value}({self.qn.n},{self.qn.l},{self.qn.k})"

    @property
    def length_scale(self) -> float:
        return self.scales.b

    @property
    def r_min(self) -> float:
        return R_MIN_FACTOR * self.scales.b

    @property
    def is_ground(self) -> bool:
        if self.system is System.HYDROGEN:
            return self.qn.n == 1
        return self.qn.n == 0 and self.qn.l == 0

    @cached_property
    def radial_form(self) -> RadialForm:
        return _radial_form(self.system, self.qn, self.scales)

    def with_energy(self, energy: float) -> Eigenstate:
        return replace(self, energy=energy)


@dataclass(frozen=True)
class AmplitudeJet:
    """ψ, its Cartesian gradient, Laplacian and time derivative at one event.

    ``laplacian_scale`` is the sum of the magnitudes of the Laplacian's radial
    terms; residual checks use it as the conditioning magnitude near nodes.
    """

    psi: complex
    grad: NDArray[np.complex128]
    laplacian: complex
    dt: complex
    laplacian_scale: float = 0.0


def _radial_form(system: System, qn: QuantumNumbers, scales: DerivedScales) -> RadialForm:
    if system is System.HYDROGEN:
        assert scales.alpha0 is not None
        scale = qn.n * scales.alpha0
        return RadialForm(l=qn.l, kappa=2.0 / scale, beta=1.0 / scale, p=1,
                          gamma=2.0 / scale, degree=qn.n - qn.l - 1, alpha=2 * qn.l + 1)
    assert scales.omega is not None
    m_omega = scales.mu * scales.omega / scales.hbar
    return RadialForm(l=qn.l, kappa=1.0, beta=0.5 * m_omega, p=2,
                      gamma=m_omega, degree=qn.n, alpha=qn.l + 0.5)


def default_r_max(system: System, qn: QuantumNumbers, scales: DerivedScales) -> float:
    if system is System.HYDROGEN:
        assert scales.alpha0 is not None
        return 40.0 * qn.n * scales.alpha0
    assert scales.omega is not None
    level = scales.energy_level(n_r=qn.n, l=qn.l) / (scales.hbar * scales.omega)
    return max(10.0, 4.0 * math.sqrt(level)) * scales.b


def _radial_bounds(
    system: System, qn: QuantumNumbers, scales: DerivedScales, quad: QuadratureConfig,
) -> tuple[float, float]:
    required = default_r_max(system, qn, scales)
    r_min = quad.r_min if quad.r_min is not None else R_MIN_FACTOR * scales.b
    r_max = quad.r_max if quad.r_max is not None else required
    if r_max < required * (1 - 1e-12):
        raise InvalidInputError(f"r_max={r_max} is below the required {required} for {qn.as_tuple()}")
    return r_min, r_max


def _build(system: System, scales: DerivedScales, qn: QuantumNumbers,
           energy: float, quad: QuadratureConfig) -> Eigenstate:
    if scales.system is not system:
        raise InvalidInputError(f"scales describe {scales.system.value}, not {system.value}")
    qn.validate(system)
    form = _radial_form(system, qn, scales)
    r_min, r_max = _radial_bounds(system, qn, scales, quad)
    integral = integrate_radial(lambda r: form.value(r) ** 2 * r**2, r_min, r_max, quad)
    norm = 1.0 / math.sqrt(integral)
    logger.debug("%s(%s) radial norm %.17g", system.value, qn.as_tuple(), norm)
    return Eigenstate(system=system, qn=qn, energy=energy, scales=scales, radial_norm=norm)


def hydrogen_state(
    scales: DerivedScales, qn: QuantumNumbers, quad: QuadratureConfig | None = None,
) -> Eigenstate:
    """Hydrogen eigenstate with E = E₀/n²."""
    qn.validate(System.HYDROGEN)
    return _build(System.HYDROGEN, scales, qn, scales.energy_level(qn.n),
                  quad or QuadratureConfig())


def oscillator_state(
    scales: DerivedScales, qn: QuantumNumbers, quad: QuadratureConfig | None = None,
) -> Eigenstate:
    """Oscillator eigenstate with E = ħω(2n_r + l + 3/2), radial Laguerre form."""
    qn.validate(System.OSCILLATOR)
    return _build(System.OSCILLATOR, scales, qn, scales.energy_level(n_r=qn.n, l=qn.l),
                  quad or QuadratureConfig())


def make_state(scales: DerivedScales, qn: QuantumNumbers,
               quad: QuadratureConfig | None = None) -> Eigenstate:
    if scales.system is System.HYDROGEN:
        return hydrogen_state(scales, qn, quad)
    return oscillator_state(scales, qn, quad)


def hydrogen_quantum_numbers(n_max: int) -> Iterator[QuantumNumbers]:
    """Every (n, l, k) with 1 <= n <= n_max."""
    for n in range(1, n_max + 1):
        for l in range(n):
            for k in range(-l, l + 1):
                yield QuantumNumbers(n, l, k)


def oscillator_quantum_numbers(level_max: int) -> Iterator[QuantumNumbers]:
    """Every (n_r, l, k) with 2n_r + l <= level_max."""
    for level in range(level_max + 1):
        for n_r in range(level // 2 + 1):
            l = level - 2 * n_r
            for k in range(-l, l + 1):
                yield QuantumNumbers(n_r, l, k)


def radial_jet(state: Eigenstate, r: FloatOrArray) -> tuple[FloatOrArray, FloatOrArray, FloatOrArray]:
    """(R, R', R'') including the normalization."""
    u, u1, u2 = state.radial_form.jet(r)
    n = state.radial_norm
    return n * u, n * u1, n * u2


def radial_value(state: Eigenstate, r: ArrayLike) -> FloatOrArray:
    rr = np.asarray(r, dtype=float)
    arg: FloatOrArray = rr if rr.ndim else float(rr)
    return state.radial_norm * state.radial_form.value(arg)


def transformed_radial(state: Eigenstate, r: ArrayLike) -> FloatOrArray:
    """R̃(r) = R(r)·exp((r/b)^λ), the radial factor left after the time shift."""
    rr = np.asarray(r, dtype=float)
    arg: FloatOrArray = rr if rr.ndim else float(rr)
    shift = (arg / state.scales.b) ** state.scales.lam
    return state.radial_norm * state.radial_form.value(arg, shift=shift)


def _time_factor(state: Eigenstate, t: float) -> complex:
    return cmath.exp(complex(0.0, -state.energy * t / state.scales.hbar))


def _spherical(x: NDArray[np.float64]) -> tuple[float, float, float, float]:
    r = float(np.linalg.norm(x))
    rho = math.hypot(x[0], x[1])
    return r, rho, math.atan2(rho, x[2]), math.atan2(x[1], x[0])


def amplitude(state: Eigenstate, x: ArrayLike, t: float) -> complex:
    """ψ(x, t) without derivatives; only the origin guard applies."""
    xv = np.asarray(x, dtype=float)
    r, _, theta, phi = _spherical(xv)
    if r <= state.r_min:
        raise SingularityError(f"r={r} is within r_min={state.r_min} of the origin")
    y = spherical_harmonic(state.qn.l, state.qn.k, theta, phi).value
    return float(radial_value(state, r)) * y * _time_factor(state, t)


def evaluate(state: Eigenstate, x: ArrayLike, t: float) -> AmplitudeJet:
    """Analytic jet of ψ = R(r) Y_lk(θ, φ) exp(-iEt/ħ)."""
    xv = np.asarray(x, dtype=float)
    r, rho, theta, phi = _spherical(xv)
    if r <= state.r_min:
        raise SingularityError(f"r={r} is within r_min={state.r_min} of the origin")
    l = state.qn.l
    harmonic = spherical_harmonic(l, state.qn.k, theta, phi, derivatives=l > 0)
    y = harmonic.value
    big_r, dr, d2r = (float(v) for v in radial_jet(state, r))
    phase = _time_factor(state, t)

    r_hat = xv / r
    grad = dr * y * r_hat.astype(complex)
    if l > 0:
        assert harmonic.dtheta is not None and harmonic.dphi is not None
        theta_hat = np.array([xv[0] * xv[2] / (r * rho), xv[1] * xv[2] / (r * rho), -rho / r])
        phi_hat = np.array([-xv[1] / rho, xv[0] / rho, 0.0])
        grad = grad + (big_r / r) * harmonic.dtheta * theta_hat + (big_r / rho) * harmonic.dphi * phi_hat

    centrifugal = l * (l + 1) * big_r / r**2
    radial_lap = d2r + 2.0 * dr / r - centrifugal
    psi = big_r * y * phase
    return AmplitudeJet(
        psi=psi,
        grad=grad * phase,
        laplacian=radial_lap * y * phase,
        dt=complex(0.0, -state.energy / state.scales.hbar) * psi,
        laplacian_scale=(abs(d2r) + abs(2.0 * dr / r) + abs(centrifugal)) * abs(y),
    )


def _angular_overlap(a: QuantumNumbers, b: QuantumNumbers) -> complex:
    theta, phi, w = angular_grid(a.l + b.l)
    total = 0j
    for th, ph, wt in zip(theta, phi, w):
        ya = spherical_harmonic(a.l, a.k, float(th), float(ph)).value
        yb = spherical_harmonic(b.l, b.k, float(th), float(ph)).value
        total += wt * ya.conjugate() * yb
    return total


def _check_quadrature(state: Eigenstate, quad: QuadratureConfig) -> tuple[float, float]:
    return _radial_bounds(state.system, state.qn, state.scales, quad)


def normalization_check(state: Eigenstate, quad: QuadratureConfig | None = None) -> float:
    """∫|ψ|² d³x by radial quadrature times the angular product rule."""
    quad = quad or QuadratureConfig(initial_panels=4)
    r_min, r_max = _check_quadrature(state, quad)
    form, norm = state.radial_form, state.radial_norm
    radial = integrate_radial(lambda r: (norm * form.value(r)) ** 2 * r**2, r_min, r_max, quad)
    return radial * _angular_overlap(state.qn, state.qn).real


def overlap(a: Eigenstate, b: Eigenstate, quad: QuadratureConfig | None = None) -> complex:
    """⟨ψ_a, ψ_b⟩ at t = 0."""
    quad = quad or QuadratureConfig(initial_panels=4)
    r_min_a, r_max_a = _check_quadrature(a, quad)
    r_min_b, r_max_b = _check_quadrature(b, quad)
    fa, fb = a.radial_form, b.radial_form
    na, nb = a.radial_norm, b.radial_norm
    radial = integrate_radial(
        lambda r: na * fa.value(r) * nb * fb.value(r) * r**2,
        min(r_min_a, r_min_b), max(r_max_a, r_max_b), quad,
    )
    return radial * _angular_overlap(a.qn, b.qn)


def count_radial_nodes(state: Eigenstate, r_max: float | None = None, samples: int = 20000) -> int:
    """Sign changes of R on a uniform grid over (r_min, r_max]."""
    upper = r_max or default_r_max(state.system, state.qn, state.scales)
    r = np.linspace(state.r_min * 10, upper, samples)
    values = np.asarray(radial_value(state, r))
    # the far tail underflows to zero; only count strict sign flips
    signs = np.sign(values[np.abs(values) > 1e-300])
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def radial_residual(state: Eigenstate, r: ArrayLike) -> FloatOrArray:
    """-(ħ²/2μ)(R'' + 2R'/r - l(l+1)R/r²) + (V - E)R."""
    rr = np.asarray(r, dtype=float)
    arg: FloatOrArray = rr if rr.ndim else float(rr)
    big_r, dr, d2r = radial_jet(state, arg)
    l = state.qn.l
    scales = state.scales
    kinetic = -(scales.hbar**2 / (2.0 * scales.mu)) * (d2r + 2.0 * dr / arg - l * (l + 1) * big_r / arg**2)
    return kinetic + (scales.potential(arg) - state.energy) * big_r


def cnl_closed_form(scales: DerivedScales, n: int, l: int) -> float:
    """Literal transcription of the closed normalization constant C_nl.

    (1/α₀)^{3/2} (2/n²) √((n-l-1)! / [(n+l)!]³), the electrostatic factor
    absorbed into α₀. Used only to adjudicate the Laguerre convention.
    """
    QuantumNumbers(n, l, 0).validate(System.HYDROGEN)
    assert scales.alpha0 is not None
    ratio = Fraction(math.factorial(n - l - 1), math.factorial(n + l) ** 3)
    return scales.alpha0**-1.5 * (2.0 / n**2) * math.sqrt(ratio)
