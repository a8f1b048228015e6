"""z-space derivative operators, ladder operators and a finite-difference oracle.

Operators act on a ``FieldHandle``: anything that returns an ``AmplitudeJet``
at (x, t). Stationary fields (energy eigenstates and the uniform test field)
take the energy-substituted form of the operators, generic fields the full
chain-rule form with the jet's time derivative.

Axes are zero-based: axis 0 is x_1.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike, NDArray

from conformal_qm.core.conformal import (
    MapParams,
    chain_rule_dz,
    shift_divergence,
    shift_gradient,
    shift_gradient_squared,
)
from conformal_qm.core.eigenstates import AmplitudeJet, Eigenstate, amplitude, evaluate
from conformal_qm.core.units import DerivedScales, System
from conformal_qm.errors import (
    InvalidInputError,
    InvalidStateError,
    SingularityError,
    StepError,
    UnsupportedSystemError,
)

logger = logging.getLogger(__name__)

JetFunction = Callable[[NDArray[np.float64], float], AmplitudeJet]
ScalarField = Callable[[NDArray[np.float64], float], complex]

DEFAULT_FD_STEP = 1e-3
SELF_CONSISTENCY_TOL = 1e-12

# off-axis directions used to validate stationary fields on construction
_CHECK_DIRECTIONS = (
    np.array([0.6, 0.3, 0.5]),
    np.array([-0.4, 0.8, -0.7]),
    np.array([1.1, -0.9, 0.2]),
)


@dataclass(frozen=True)
class FieldHandle:
    """An evaluable field ψ(x, t) with its analytic jet.

    ``energy`` is the eigenvalue of a stationary field; the energy
    substitution iħ∂/∂t → E is only applied when ``stationary`` is set.
    """

    jet: JetFunction
    scales: DerivedScales
    energy: float | None = None
    stationary: bool = False
    name: str = "field"

    def __post_init__(self) -> None:
        if self.stationary and self.energy is None:
            raise InvalidInputError("a stationary field needs an energy")

    def __call__(self, x: ArrayLike, t: float) -> AmplitudeJet:
        return self.jet(np.asarray(x, dtype=float), t)

    def value(self, x: ArrayLike, t: float) -> complex:
        return self(x, t).psi

    @property
    def length_scale(self) -> float:
        return self.scales.length_scale

    def check_consistency(self, t: float = 0.3) -> float:
        """Largest |dt + (iE/ħ)ψ| / |Eψ/ħ| over a few off-axis points."""
        if self.energy is None:
            raise InvalidInputError(f"{self.name} has no energy to check against")
        rate = complex(0.0, -self.energy / self.scales.hbar)
        worst = 0.0
        for direction in _CHECK_DIRECTIONS:
            jet = self(direction * self.length_scale, t)
            scale = abs(rate * jet.psi)
            if scale > 0:
                worst = max(worst, abs(jet.dt - rate * jet.psi) / scale)
        return worst

    @classmethod
    def from_state(cls, state: Eigenstate) -> FieldHandle:
        """Wrap an eigenstate; its jet must satisfy dt = (-iE/ħ)ψ."""
        field = cls(
            jet=lambda x, t: evaluate(state, x, t),
            scales=state.scales,
            energy=state.energy,
            stationary=True,
            name=state.label,
        )
        deviation = field.check_consistency()
        if deviation > SELF_CONSISTENCY_TOL:
            raise InvalidStateError(
                f"{state.label}: time derivative deviates from -iE/ħ·ψ by {deviation:.3e}"
            )
        return field


def uniform_field(scales: DerivedScales, energy: float, value: complex = 1.0) -> FieldHandle:
    """f(x, t) = value·exp(-iEt/ħ): constant in space, stationary in time."""
    rate = complex(0.0, -energy / scales.hbar)

    def jet(x: NDArray[np.float64], t: float) -> AmplitudeJet:
        psi = value * np.exp(rate * t)
        return AmplitudeJet(psi=complex(psi), grad=np.zeros(3, dtype=complex),
                            laplacian=0j, dt=complex(rate * psi))

    return FieldHandle(jet=jet, scales=scales, energy=energy, stationary=True, name="uniform")


class OperatorKind(StrEnum):
    DZ = "dz"
    DZ_STAR = "dz_star"
    DZ_STAR_DZ = "dz_star_dz"
    LADDER_LOWER = "ladder_lower"
    LADDER_RAISE = "ladder_raise"
    LAPLACIAN = "laplacian"
    GRADIENT = "gradient"


AXIAL_KINDS = frozenset({OperatorKind.DZ, OperatorKind.DZ_STAR,
                         OperatorKind.LADDER_LOWER, OperatorKind.LADDER_RAISE})
LADDER_KINDS = frozenset({OperatorKind.LADDER_LOWER, OperatorKind.LADDER_RAISE})


@dataclass(frozen=True)
class OperatorSpec:
    """One operator of the family, bound to its map parameters."""

    kind: OperatorKind
    map: MapParams
    axis: int | None = None

    def __post_init__(self) -> None:
        if self.kind in LADDER_KINDS and self.map.lam != 2:
            raise UnsupportedSystemError(f"{self.kind.value} requires lambda = 2, got {self.map.lam}")
        if self.kind in AXIAL_KINDS and self.axis not in (0, 1, 2):
            raise InvalidInputError(f"{self.kind.value} needs an axis in 0..2, got {self.axis}")

    def apply(self, f: FieldHandle, x: ArrayLike, t: float) -> complex | NDArray[np.complex128]:
        match self.kind:
            case OperatorKind.DZ | OperatorKind.DZ_STAR:
                assert self.axis is not None
                return dz_apply(f, x, t, self.axis, self.map,
                                conjugate=self.kind is OperatorKind.DZ_STAR)
            case OperatorKind.DZ_STAR_DZ:
                return dzdz_apply(f, x, t, self.map).analytic
            case OperatorKind.LADDER_LOWER | OperatorKind.LADDER_RAISE:
                assert self.axis is not None
                return ladder_apply(f, x, t, self.axis, self.kind, self.map)
            case OperatorKind.LAPLACIAN:
                return f(x, t).laplacian
            case OperatorKind.GRADIENT:
                return f(x, t).grad


def _point(x: ArrayLike, p: MapParams, r_min: float) -> NDArray[np.float64]:
    xv = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(xv))
    if r <= r_min:
        raise SingularityError(f"r={r} is within r_min={r_min} of the origin")
    return xv


def _substitution_ratio(f: FieldHandle, p: MapParams) -> float:
    """i(ħ/E_map)·∂_t → E_field/E_map under iħ∂_t → E_field."""
    assert f.energy is not None
    return f.energy / p.E


def dz_vector(
    f: FieldHandle, x: ArrayLike, t: float, p: MapParams, *,
    conjugate: bool = False, substitute: bool | None = None,
) -> NDArray[np.complex128]:
    """(∂f/∂z_1, ∂f/∂z_2, ∂f/∂z_3), or the conjugate derivatives."""
    xv = _point(x, p, 1e-8 * f.length_scale)
    jet = f(xv, t)
    g = shift_gradient(xv, p)
    sign = -1.0 if conjugate else 1.0
    if substitute is None:
        substitute = f.stationary
    if substitute:
        return jet.grad + sign * _substitution_ratio(f, p) * g * jet.psi
    return chain_rule_dz(jet.grad, jet.dt, g, p, conjugate=conjugate)


def dz_apply(
    f: FieldHandle, x: ArrayLike, t: float, i: int, p: MapParams, *,
    conjugate: bool = False, substitute: bool | None = None,
) -> complex:
    """∂f/∂z_i = ∂f/∂x_i + b^-λ (∂r^λ/∂x_i) f for stationary fields.

    The conjugate derivative flips the sign of the second term. Generic fields
    use ∂f/∂x_i ± i(ħ/E) b^-λ (∂r^λ/∂x_i) ∂f/∂t instead.
    """
    if i not in (0, 1, 2):
        raise InvalidInputError(f"axis must be 0, 1 or 2, got {i}")
    return complex(dz_vector(f, x, t, p, conjugate=conjugate, substitute=substitute)[i])


@dataclass(frozen=True)
class DzDzResult:
    """Σ_i ∂²f/∂z_i*∂z_i by analytic expansion and by nested finite differences."""

    analytic: complex
    nested_fd: complex | None
    local_scale: float

    @property
    def deviation(self) -> float:
        if self.nested_fd is None:
            return math.nan
        return abs(self.analytic - self.nested_fd)


def dzdz_analytic(f: FieldHandle, x: ArrayLike, t: float, p: MapParams) -> tuple[complex, float]:
    """∇²f + c·b^-λ ∇²r^λ f - c²·b^-2λ |∇r^λ|² f with c = E_field/E_map.

    Returns the value and the sum of magnitudes of its terms.
    """
    if not f.stationary:
        raise InvalidInputError("the analytic expansion needs a stationary field")
    xv = _point(x, p, 1e-8 * f.length_scale)
    r = float(np.linalg.norm(xv))
    jet = f(xv, t)
    c = _substitution_ratio(f, p)
    div_term = c * shift_divergence(r, p) * jet.psi
    square_term = c * c * shift_gradient_squared(r, p) * jet.psi
    value = jet.laplacian + div_term - square_term
    scale = max(jet.laplacian_scale, abs(jet.laplacian))
    return complex(value), scale + abs(div_term) + abs(square_term)


def dzdz_apply(
    f: FieldHandle, x: ArrayLike, t: float, p: MapParams, *,
    fd_step: float = DEFAULT_FD_STEP, order: int = 4, nested: bool = True,
) -> DzDzResult:
    """Mixed derivative Σ_i ∂/∂z_i*(∂f/∂z_i), analytic path plus nested-FD oracle."""
    value, scale = dzdz_analytic(f, x, t, p)
    if not nested:
        return DzDzResult(analytic=value, nested_fd=None, local_scale=scale)
    xv = np.asarray(x, dtype=float)
    h = nested_step(f, xv, fd_step)
    c = _substitution_ratio(f, p)
    g = shift_gradient(xv, p)
    total = 0j
    for i in range(3):
        def inner(y: NDArray[np.float64], _t: float, i: int = i) -> complex:
            return dz_apply(f, y, t, i, p)

        derivative = _first_derivative(inner, xv, t, i, h, order)
        total += derivative - c * g[i] * dz_apply(f, xv, t, i, p)
    return DzDzResult(analytic=value, nested_fd=complex(total), local_scale=scale)


def ladder_apply(
    f: FieldHandle, x: ArrayLike, t: float, i: int, kind: OperatorKind | str, p: MapParams,
) -> complex:
    """â_i f = (b/2)∂f/∂z_i, â_i† f = -(b/2)∂f/∂z_i*."""
    kind = OperatorKind(kind)
    if p.lam != 2:
        raise UnsupportedSystemError(f"ladder operators require lambda = 2, got {p.lam}")
    if f.scales.system is not System.OSCILLATOR:
        raise UnsupportedSystemError("ladder operators act on oscillator fields")
    if kind is OperatorKind.LADDER_LOWER:
        return 0.5 * p.b * dz_apply(f, x, t, i, p)
    if kind is OperatorKind.LADDER_RAISE:
        return -0.5 * p.b * dz_apply(f, x, t, i, p, conjugate=True)
    raise InvalidInputError(f"{kind.value} is not a ladder operator")


def ladder_commutator(
    f: FieldHandle, x: ArrayLike, t: float, i: int, p: MapParams,
    fd_step: float = DEFAULT_FD_STEP,
) -> complex:
    """[â_i, â_i†] f, with the outer operator applied by finite differences."""
    xv = np.asarray(x, dtype=float)
    h = nested_step(f, xv, fd_step)
    c = _substitution_ratio(f, p)
    g_i = float(shift_gradient(xv, p)[i])
    half_b = 0.5 * p.b

    def raised(y: NDArray[np.float64], _t: float) -> complex:
        return ladder_apply(f, y, t, i, OperatorKind.LADDER_RAISE, p)

    def lowered(y: NDArray[np.float64], _t: float) -> complex:
        return ladder_apply(f, y, t, i, OperatorKind.LADDER_LOWER, p)

    lower_of_raise = half_b * (_first_derivative(raised, xv, t, i, h, 4) + c * g_i * raised(xv, t))
    raise_of_lower = -half_b * (_first_derivative(lowered, xv, t, i, h, 4) - c * g_i * lowered(xv, t))
    return complex(lower_of_raise - raise_of_lower)


def operator_identity_terms(
    f: FieldHandle, x: ArrayLike, t: float, p: MapParams,
) -> tuple[complex, complex, float]:
    """Both sides of the potential-eliminating identity for a hydrogen field.

    Left: (ħ²/2μ) Σ ∂²f/∂z_i*∂z_i + (ħ²/2μα₀²) f.
    Right: (ħ²/2μ) ∇²f + (e²/4πε₀r) f.
    The third value is the summed magnitude of all terms.
    """
    scales = f.scales
    if scales.system is not System.HYDROGEN or scales.alpha0 is None:
        raise UnsupportedSystemError("the operator identity is stated for hydrogen")
    assert scales.coulomb_strength is not None
    xv = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(xv))
    kinetic = scales.hbar**2 / (2.0 * scales.mu)
    mixed, mixed_scale = dzdz_analytic(f, xv, t, p)
    jet = f(xv, t)
    constant = kinetic / scales.alpha0**2 * jet.psi
    coulomb = scales.coulomb_strength / r * jet.psi
    lhs = kinetic * mixed + constant
    rhs = kinetic * jet.laplacian + coulomb
    scale = kinetic * mixed_scale + abs(constant) + kinetic * abs(jet.laplacian) + abs(coulomb)
    return complex(lhs), complex(rhs), scale


def nested_step(f: FieldHandle, x: NDArray[np.float64], fd_step: float = DEFAULT_FD_STEP) -> float:
    """fd_step times the smaller of the field's length scale and r."""
    return fd_step * min(f.length_scale, float(np.linalg.norm(x)))


def _as_scalar(f: FieldHandle | ScalarField) -> ScalarField:
    if isinstance(f, FieldHandle):
        return f.value
    return f


def _check_step(h: float, order: int, scale: float) -> None:
    if order not in (2, 4):
        raise InvalidInputError(f"finite-difference order must be 2 or 4, got {order}")
    if not h > 1e3 * np.finfo(float).eps * scale:
        raise StepError(f"step h={h} underflows at scale {scale}")


def _first_derivative(
    fn: ScalarField, x: NDArray[np.float64], t: float, axis: int, h: float, order: int,
) -> complex:
    e = np.zeros(3)
    e[axis] = h
    if order == 2:
        return (fn(x + e, t) - fn(x - e, t)) / (2 * h)
    return (-fn(x + 2 * e, t) + 8 * fn(x + e, t) - 8 * fn(x - e, t) + fn(x - 2 * e, t)) / (12 * h)


def _second_derivative(
    fn: ScalarField, x: NDArray[np.float64], t: float, axis: int, h: float, order: int,
    center: complex,
) -> complex:
    e = np.zeros(3)
    e[axis] = h
    if order == 2:
        return (fn(x + e, t) - 2 * center + fn(x - e, t)) / h**2
    return (-fn(x + 2 * e, t) + 16 * fn(x + e, t) - 30 * center
            + 16 * fn(x - e, t) - fn(x - 2 * e, t)) / (12 * h**2)


def fd_gradient(
    f: FieldHandle | ScalarField, x: ArrayLike, t: float, h: float, order: int = 4, *,
    richardson: bool = False, scale: float | None = None,
) -> NDArray[np.complex128]:
    """Central-difference gradient; ``richardson`` extrapolates from h and h/2."""
    xv = np.asarray(x, dtype=float)
    _check_step(h, order, scale if scale is not None else max(1.0, float(np.linalg.norm(xv))))
    fn = _as_scalar(f)

    def estimate(step: float) -> NDArray[np.complex128]:
        return np.array([_first_derivative(fn, xv, t, i, step, order) for i in range(3)])

    coarse = estimate(h)
    if not richardson:
        return coarse
    factor = 2.0**order
    return (factor * estimate(h / 2) - coarse) / (factor - 1.0)


def fd_laplacian(
    f: FieldHandle | ScalarField, x: ArrayLike, t: float, h: float, order: int = 4, *,
    richardson: bool = False, scale: float | None = None,
) -> complex:
    """Central-difference Laplacian, optionally Richardson-extrapolated."""
    xv = np.asarray(x, dtype=float)
    _check_step(h, order, scale if scale is not None else max(1.0, float(np.linalg.norm(xv))))
    fn = _as_scalar(f)
    center = fn(xv, t)

    def estimate(step: float) -> complex:
        return sum(_second_derivative(fn, xv, t, i, step, order, center) for i in range(3))

    coarse = estimate(h)
    if not richardson:
        return complex(coarse)
    factor = 2.0**order
    return complex((factor * estimate(h / 2) - coarse) / (factor - 1.0))


def amplitude_field(state: Eigenstate) -> ScalarField:
    """ψ(x, t) as a plain scalar function, for finite-difference oracles."""
    return lambda x, t: amplitude(state, x, t)
