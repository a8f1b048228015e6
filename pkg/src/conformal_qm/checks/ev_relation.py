"""The relation between V and E₀ implied by a map index λ, and its decomposition.

For the map s = t - i(ħ/E)(r/b)^λ the transformed equation is free of the
potential only when

    (1/b^2λ)(∂r^λ/∂x_i)² - (1/b^λ)∂²r^λ/∂x_i² = (2μ/ħ²)(V - E₀)

The left side is the sum of two monomials in r. The relation separates into
a potential V(r) and a constant E₀ only when one of them is constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from conformal_qm.checks.cloud import ResidualAccumulator, SampleCloud
from conformal_qm.core.result import Basis, ResidualStats
from conformal_qm.core.units import DerivedScales, PhysicalConstants, System, derive_scales
from conformal_qm.errors import DomainError, InvalidInputError, UnsupportedSystemError

EV_RELATION = "(1/b^2λ)(∂r^λ)² - (1/b^λ)∂²r^λ = (2μ/ħ²)(V - E₀)"
DECOMPOSITION = "separable ⇔ one monomial of the relation is constant"
REFERENCE = "V and E₀ of the relation = the system's own V and E₀"
NON_SEPARABLE_SAMPLES = (Fraction(1, 2), Fraction(3, 2), Fraction(3))


@dataclass(frozen=True)
class Monomial:
    """rational · (ħ²/μ) · r^r_power / b^b_power, with ``coefficient`` the numeric prefactor."""

    rational: Fraction
    r_power: Fraction
    b_power: Fraction
    coefficient: float

    def value(self, r: float) -> float:
        return self.coefficient * r ** float(self.r_power)

    def to_dict(self) -> dict[str, Any]:
        return {
            "rational": str(self.rational),
            "r_power": float(self.r_power),
            "b_power": float(self.b_power),
            "coefficient": self.coefficient,
        }


@dataclass(frozen=True)
class DecompositionReport:
    """(ħ²/2μ) times the left side of the relation, split into its two monomials."""

    lam: Fraction
    b: float
    term_kinetic: Monomial
    term_potential_like: Monomial
    separable: bool
    V_form: Monomial | None = None
    E0_rational: Fraction | None = None
    E0_value: float | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "lambda": float(self.lam),
            "b": self.b,
            "term_kinetic": self.term_kinetic.to_dict(),
            "term_potential_like": self.term_potential_like.to_dict(),
            "separable": self.separable,
            "V_form": self.V_form.to_dict() if self.V_form else None,
            "E0_rational": str(self.E0_rational) if self.E0_rational is not None else None,
            "E0_value": self.E0_value,
        }

    @property
    def summary(self) -> str:
        if not self.separable:
            return (f"lambda={self.lam}: powers {self.term_kinetic.r_power} and "
                    f"{self.term_potential_like.r_power}, not separable")
        assert self.V_form is not None
        return (f"lambda={self.lam}: V = {self.V_form.coefficient:.6g} r^{self.V_form.r_power}, "
                f"E0 = {self.E0_value:.6g}")


def _as_fraction(lam: float | Fraction | str) -> Fraction:
    try:
        value = lam if isinstance(lam, Fraction) else Fraction(str(lam))
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidInputError(f"lambda must be a number, got {lam!r}") from exc
    return value


def decompose_lambda(lam: float | Fraction | str, b: float, scales: DerivedScales) -> DecompositionReport:
    """Split (ħ²/2μ)·LHS into ħ²λ²/2μb^2λ · r^(2λ-2) and -ħ²λ(λ+1)/2μb^λ · r^(λ-2).

    The rational parts are exact, so λ = 1 and λ = 2 reproduce the closed
    forms of V and E₀ without rounding.
    """
    value = _as_fraction(lam)
    if value <= 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    if not (math.isfinite(b) and b > 0):
        raise InvalidInputError(f"b must be positive and finite, got {b}")
    unit = scales.hbar**2 / scales.mu

    def monomial(rational: Fraction, r_power: Fraction, b_power: Fraction) -> Monomial:
        return Monomial(rational, r_power, b_power, float(rational) * unit / b ** float(b_power))

    kinetic = monomial(value**2 / 2, 2 * value - 2, 2 * value)
    potential_like = monomial(-value * (value + 1) / 2, value - 2, value)
    constant = [m for m in (kinetic, potential_like) if m.r_power == 0]
    if len(constant) != 1:
        return DecompositionReport(value, b, kinetic, potential_like, separable=False)
    varying = potential_like if constant[0] is kinetic else kinetic
    return DecompositionReport(
        value, b, kinetic, potential_like, separable=True, V_form=varying,
        E0_rational=-constant[0].rational, E0_value=-constant[0].coefficient,
    )


def closed_forms(lam: int, b: float, scales: DerivedScales) -> tuple[Monomial, float]:
    """V and E₀ solving the relation for λ = 1 and λ = 2."""
    if lam not in (1, 2):
        raise UnsupportedSystemError(
            f"closed forms exist for lambda 1 and 2 only, got {lam}; use decompose_lambda"
        )
    unit = scales.hbar**2 / scales.mu
    if lam == 1:
        return Monomial(Fraction(-1), Fraction(-1), Fraction(1), -unit / b), -unit / (2 * b**2)
    return Monomial(Fraction(2), Fraction(2), Fraction(4), 2 * unit / b**4), 3 * unit / b**2


def check_ev_relation(
    lam: int, b: float, scales: DerivedScales, cloud: SampleCloud, tol: float = 1e-12,
) -> ResidualStats:
    """LHS against (2μ/ħ²)(V - E₀) at every cloud radius, relative to the term sizes."""
    potential, e0 = closed_forms(lam, b, scales)
    acc = ResidualAccumulator(f"ev_relation[lambda={lam}]", EV_RELATION, tol, len(cloud))
    factor = 2 * scales.mu / scales.hbar**2
    for r in cloud.radii:
        first = lam**2 * r ** (2 * lam - 2) / b ** (2 * lam)
        second = lam * (lam + 1) * r ** (lam - 2) / b**lam
        rhs = factor * (potential.value(float(r)) - e0)
        acc.add(abs(first - second - rhs), first + second)
    return acc.stats()


@dataclass(frozen=True)
class ReferenceRow:
    """V(r) = V_coefficient·r^V_power and E₀ of one system from its own constants."""

    system: System
    b: float
    lam: int
    V_coefficient: float
    V_power: int
    E0: float


def reference_row(constants: PhysicalConstants, system: System | str) -> ReferenceRow:
    """Hydrogen: -e²/4πε₀r and -μe⁴/(32π²ε₀²ħ²). Oscillator: μω²r²/2 and 3ħω/2."""
    scales = derive_scales(constants, system)
    if scales.system is System.HYDROGEN:
        coulomb = constants.coulomb_strength
        return ReferenceRow(scales.system, scales.b, 1, -coulomb, -1,
                        -constants.mu * coulomb**2 / (2 * constants.hbar**2))
    return ReferenceRow(scales.system, scales.b, 2, 0.5 * constants.mu * constants.omega**2, 2,
                    1.5 * constants.hbar * constants.omega)


def check_reference(constants: PhysicalConstants, system: System | str, tol: float = 1e-12) -> ResidualStats:
    """Decomposition at the system's λ and b against its V and E₀."""
    row = reference_row(constants, system)
    scales = derive_scales(constants, system)
    report = decompose_lambda(row.lam, row.b, scales)
    assert report.V_form is not None and report.E0_value is not None
    deviations = [
        abs(report.V_form.coefficient - row.V_coefficient) / abs(row.V_coefficient),
        abs(report.E0_value - row.E0) / abs(row.E0),
        abs(float(report.V_form.r_power) - row.V_power),
    ]
    worst = max(deviations)
    return ResidualStats(
        name=f"reference[{row.system.value}]", eq_ref=REFERENCE, n_points=len(deviations),
        max_abs=worst, max_rel=worst, mean_abs=sum(deviations) / len(deviations), tol=tol,
    )


def check_decomposition(scales: DerivedScales) -> ResidualStats:
    """Exact V and E₀ rationals for λ = 1, 2 and non-separability elsewhere.

    The residual is the number of λ values whose classification or rational
    coefficients are wrong.
    """
    expected = {
        Fraction(1): (Fraction(-1), Fraction(-1, 2)),
        Fraction(2): (Fraction(2), Fraction(3)),
    }
    mismatches = 0
    for lam, (v_rational, e0_rational) in expected.items():
        report = decompose_lambda(lam, scales.b, scales)
        if (not report.separable or report.V_form is None
                or report.V_form.rational != v_rational or report.E0_rational != e0_rational):
            mismatches += 1
    for lam in NON_SEPARABLE_SAMPLES:
        if decompose_lambda(lam, scales.b, scales).separable:
            mismatches += 1
    checked = len(expected) + len(NON_SEPARABLE_SAMPLES)
    return ResidualStats(
        name="lambda_decomposition", eq_ref=DECOMPOSITION, n_points=checked,
        max_abs=float(mismatches), max_rel=float(mismatches), mean_abs=mismatches / checked,
        tol=0.0, basis=Basis.ABSOLUTE,
    )
