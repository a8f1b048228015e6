"""Pointwise residual checks of one eigenstate over a sample cloud."""

from __future__ import annotations

import logging

import numpy as np

from conformal_qm.checks.cloud import ResidualAccumulator, SampleCloud, conditioned
from conformal_qm.core.conformal import (
    MapParams,
    map_forward,
    map_inverse,
    transformed_wavefunction,
)
from conformal_qm.core.eigenstates import Eigenstate, amplitude, evaluate, normalization_check
from conformal_qm.core.operators import (
    FieldHandle,
    amplitude_field,
    dzdz_analytic,
    dzdz_apply,
    fd_gradient,
    fd_laplacian,
    operator_identity_terms,
)
from conformal_qm.core.result import Basis, ResidualStats
from conformal_qm.core.units import System
from conformal_qm.errors import PoleProximityError, SingularityError, UnsupportedSystemError

logger = logging.getLogger(__name__)

GUARDS = (SingularityError, PoleProximityError)

SCHRODINGER = "-(ħ²/2μ)∇²ψ + Vψ = Eψ"
TRANSFORMED = "-(ħ²/2μ) Σ ∂²ψ/∂z_i*∂z_i = (E - E₀)ψ"
OPERATOR_IDENTITY = "(ħ²/2μ) Σ ∂²/∂z_i*∂z_i + ħ²/2μα₀² = (ħ²/2μ)∇² + e²/4πε₀r"
CONSISTENCY = "ψ(z, s) = R̃(r_z) Y τ(s) = ψ(x, t)"
JET = "analytic ∇ψ, ∇²ψ = central differences"
MIXED = "analytic Σ ∂²ψ/∂z_i*∂z_i = nested differences"
NORMALIZATION = "∫|ψ|² d³x = 1"
ROUNDTRIP = "x = z, t = s + i(ħ/E)(r/b)^λ"


def _kinetic(state: Eigenstate) -> float:
    return state.scales.hbar**2 / (2.0 * state.scales.mu)


def _label(base: str, state: Eigenstate) -> str:
    return f"{base}[{state.label}]"


def residual_schrodinger(state: Eigenstate, cloud: SampleCloud, tol: float = 1e-9) -> ResidualStats:
    """|-(ħ²/2μ)∇²ψ + Vψ - Eψ| relative to |Eψ|."""
    acc = ResidualAccumulator(_label("schrodinger", state), SCHRODINGER, tol, len(cloud))
    kinetic = _kinetic(state)
    for x, t in cloud:
        try:
            jet = evaluate(state, x, t)
        except GUARDS as exc:
            acc.skip(exc)
            continue
        kin = -kinetic * jet.laplacian
        pot = state.scales.potential(float(np.linalg.norm(x))) * jet.psi
        energy = state.energy * jet.psi
        local = kinetic * jet.laplacian_scale + abs(pot) + abs(energy)
        acc.add(abs(kin + pot - energy), conditioned(abs(energy), local), abs(jet.psi))
    return acc.stats()


def residual_transformed(state: Eigenstate, cloud: SampleCloud, tol: float = 1e-9) -> ResidualStats:
    """|-(ħ²/2μ)∂²ψ/∂z*∂z - (E - E₀)ψ|, relative to |(E - E₀)ψ| or |E₀ψ| for ground states."""
    acc = ResidualAccumulator(_label("transformed", state), TRANSFORMED, tol, len(cloud))
    field = FieldHandle.from_state(state)
    p = MapParams.for_state(state)
    kinetic = _kinetic(state)
    e0 = state.scales.E_ground
    gap = state.energy - e0
    for x, t in cloud:
        try:
            mixed, mixed_scale = dzdz_analytic(field, x, t, p)
            psi = field.value(x, t)
        except GUARDS as exc:
            acc.skip(exc)
            continue
        lhs = -kinetic * mixed
        rhs = gap * psi
        reference = abs(e0 * psi) if state.is_ground else abs(rhs)
        local = kinetic * mixed_scale + abs(rhs)
        acc.add(abs(lhs - rhs), conditioned(reference, local), abs(psi))
    return acc.stats()


def residual_operator_identity(
    state: Eigenstate, cloud: SampleCloud, tol: float = 1e-9,
) -> ResidualStats:
    """Both sides of the potential-eliminating identity applied to ψ."""
    if state.system is not System.HYDROGEN:
        raise UnsupportedSystemError("the operator identity is checked on hydrogen states")
    acc = ResidualAccumulator(_label("operator_identity", state), OPERATOR_IDENTITY, tol, len(cloud))
    field = FieldHandle.from_state(state)
    p = MapParams.for_state(state)
    for x, t in cloud:
        try:
            lhs, rhs, local = operator_identity_terms(field, x, t, p)
            psi = field.value(x, t)
        except GUARDS as exc:
            acc.skip(exc)
            continue
        acc.add(abs(lhs - rhs), conditioned(max(abs(lhs), abs(rhs)), local), abs(psi))
    return acc.stats()


def wavefunction_consistency(
    state: Eigenstate, cloud: SampleCloud, tol: float = 1e-12,
) -> ResidualStats:
    """Transformed wavefunction at (z, s) against ψ at the preimage (x, t)."""
    acc = ResidualAccumulator(_label("wavefunction_consistency", state), CONSISTENCY, tol, len(cloud))
    p = MapParams.for_state(state)
    for x, t in cloud:
        try:
            event = map_forward(x, t, p)
            x_back, t_back = map_inverse(event, p)
            transformed = transformed_wavefunction(state, event)
            direct = amplitude(state, x_back, t_back)
        except GUARDS as exc:
            acc.skip(exc)
            continue
        acc.add(abs(transformed - direct), abs(direct), abs(direct))
    return acc.stats()


def jet_consistency(
    state: Eigenstate, cloud: SampleCloud, tol: float = 1e-5, fd_step: float = 1e-3,
) -> ResidualStats:
    """Analytic gradient and Laplacian against 4th-order central differences."""
    acc = ResidualAccumulator(_label("jet_fd", state), JET, tol, len(cloud))
    scalar = amplitude_field(state)
    b = state.length_scale
    for x, t in cloud:
        try:
            jet = evaluate(state, x, t)
            h = fd_step * min(b, float(np.linalg.norm(x)))
            grad = fd_gradient(scalar, x, t, h, 4, scale=b)
            lap = fd_laplacian(scalar, x, t, h, 4, scale=b)
        except GUARDS as exc:
            acc.skip(exc)
            continue
        psi = abs(jet.psi)
        grad_err = float(np.linalg.norm(jet.grad - grad))
        grad_ref = max(float(np.linalg.norm(jet.grad)), psi / b)
        lap_err = abs(jet.laplacian - lap)
        lap_ref = max(abs(jet.laplacian), jet.laplacian_scale, psi / b**2)
        # both errors on the gradient's scale so one relative figure covers them
        acc.add(max(grad_err, lap_err * grad_ref / lap_ref), grad_ref, psi)
    return acc.stats()


def mixed_derivative_consistency(
    state: Eigenstate, cloud: SampleCloud, tol: float = 1e-5, fd_step: float = 1e-3,
) -> ResidualStats:
    """Analytic Σ ∂²ψ/∂z_i*∂z_i against nested finite differences of ∂ψ/∂z_i."""
    acc = ResidualAccumulator(_label("dzdz_fd", state), MIXED, tol, len(cloud))
    field = FieldHandle.from_state(state)
    p = MapParams.for_state(state)
    for x, t in cloud:
        try:
            result = dzdz_apply(field, x, t, p, fd_step=fd_step)
            psi = field.value(x, t)
        except GUARDS as exc:
            acc.skip(exc)
            continue
        acc.add(result.deviation, conditioned(abs(result.analytic), result.local_scale), abs(psi))
    return acc.stats()


def normalization_stats(state: Eigenstate, tol: float = 1e-8) -> ResidualStats:
    """|∫|ψ|² d³x - 1| by quadrature."""
    deviation = abs(normalization_check(state) - 1.0)
    return ResidualStats(
        name=_label("normalization", state), eq_ref=NORMALIZATION, n_points=1,
        max_abs=deviation, max_rel=deviation, mean_abs=deviation, tol=tol, basis=Basis.ABSOLUTE,
    )


def map_roundtrip(state: Eigenstate, cloud: SampleCloud, tol: float = 1e-13) -> ResidualStats:
    """Forward then inverse map on both branches, plus isometry and conjugacy."""
    acc = ResidualAccumulator(_label("map_roundtrip", state), ROUNDTRIP, tol, len(cloud),
                              basis=Basis.ABSOLUTE)
    p = MapParams.for_state(state)
    for x, t in cloud:
        error = 0.0
        plain = map_forward(x, t, p)
        starred = map_forward(x, t, p, conjugate=True)
        for event in (plain, starred):
            x_back, t_back = map_inverse(event, p)
            error = max(error, float(np.max(np.abs(x_back - x))) / max(1.0, float(np.linalg.norm(x))),
                        abs(t_back - t) / max(1.0, abs(t)))
        isometry = float(np.max(np.abs(np.array(plain.z) - x)))
        error = max(error, isometry, abs(starred.s - plain.s.conjugate()))
        acc.add(error, 1.0)
    return acc.stats()
