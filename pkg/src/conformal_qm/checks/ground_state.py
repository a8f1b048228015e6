"""Ground-state conditions and the oscillator ladder operators."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

from conformal_qm.checks.cloud import ResidualAccumulator, SampleCloud
from conformal_qm.core.conformal import MapParams
from conformal_qm.core.eigenstates import Eigenstate, QuantumNumbers, amplitude, oscillator_state
from conformal_qm.core.operators import (
    FieldHandle,
    OperatorKind,
    dz_vector,
    ladder_apply,
    ladder_commutator,
)
from conformal_qm.core.result import ResidualStats
from conformal_qm.core.units import DerivedScales, System
from conformal_qm.errors import (
    InvalidStateError,
    PoleProximityError,
    SingularityError,
    UnsupportedSystemError,
)

logger = logging.getLogger(__name__)

GUARDS = (SingularityError, PoleProximityError)
LADDER_RADIUS = 3.0
AXIS_FRACTION = 1e-2

GROUND = "∂ψ₀/∂z_i = 0 and iħ∂ψ₀/∂s = Eψ₀"
LOWERING = "â_i ψ₀ = 0"
RAISING = "â_i† ψ₀ ∝ x_i ψ₀"
COMMUTATOR = "[â_i, â_i†] ψ₀ = c ψ₀"


def ground_state_condition(
    state: Eigenstate, cloud: SampleCloud, tol: float = 1e-12,
) -> ResidualStats:
    """max_i |∂ψ₀/∂z_i|·b and |iħ∂ψ₀/∂t - Eψ₀|/|E|, both relative to |ψ₀|."""
    if not state.is_ground:
        raise InvalidStateError(f"{state.label} is not a ground state")
    acc = ResidualAccumulator(f"ground_state[{state.label}]", GROUND, tol, len(cloud))
    field = FieldHandle.from_state(state)
    p = MapParams.for_state(state)
    b = state.length_scale
    hbar = state.scales.hbar
    for x, t in cloud:
        try:
            jet = field(x, t)
            dz = dz_vector(field, x, t, p)
        except GUARDS as exc:
            acc.skip(exc)
            continue
        s_residual = abs(1j * hbar * jet.dt - state.energy * jet.psi) / abs(state.energy)
        acc.add(max(float(np.max(np.abs(dz))) * b, s_residual), abs(jet.psi), abs(jet.psi))
    return acc.stats()


def _require_oscillator_ground(state: Eigenstate) -> None:
    if state.system is not System.OSCILLATOR:
        raise UnsupportedSystemError("ladder operators act on oscillator states")
    if not state.is_ground:
        raise InvalidStateError(f"{state.label} is not the oscillator ground state")


def ladder_cloud(state: Eigenstate, cloud: SampleCloud) -> SampleCloud:
    """Points with r ≤ 3b at t = 0."""
    return cloud.within(LADDER_RADIUS * state.length_scale).at_time(0.0)


def cartesian_first_excited(
    scales: DerivedScales, axis: int,
) -> Callable[[NDArray[np.float64]], complex]:
    """x_i-shaped first excited oscillator state built from the (0, 1, k) eigenstates."""
    states = {k: oscillator_state(scales, QuantumNumbers(0, 1, k)) for k in (-1, 0, 1)}

    def psi(x: NDArray[np.float64]) -> complex:
        minus, zero, plus = (amplitude(states[k], x, 0.0) for k in (-1, 0, 1))
        if axis == 0:
            return (minus - plus) / math.sqrt(2.0)
        if axis == 1:
            return 1j * (minus + plus) / math.sqrt(2.0)
        return zero

    return psi


def ladder_lowering(state: Eigenstate, cloud: SampleCloud, tol: float = 1e-12) -> ResidualStats:
    """max_i |â_i ψ₀| relative to |ψ₀|."""
    _require_oscillator_ground(state)
    points = ladder_cloud(state, cloud)
    acc = ResidualAccumulator("ladder_lowering", LOWERING, tol, len(points))
    field = FieldHandle.from_state(state)
    p = MapParams.for_state(state)
    for x, t in points:
        try:
            lowered = max(abs(ladder_apply(field, x, t, i, OperatorKind.LADDER_LOWER, p))
                          for i in range(3))
            psi = abs(field.value(x, t))
        except GUARDS as exc:
            acc.skip(exc)
            continue
        acc.add(lowered, psi, psi)
    return acc.stats()


def _spread(name: str, eq_ref: str, ratios: list[complex], tol: float, skipped: int) -> ResidualStats:
    if not ratios:
        return ResidualStats(name=name, eq_ref=eq_ref, tol=tol, n_skipped=skipped)
    values = np.array(ratios)
    mean = complex(values.mean())
    deviation = np.abs(values - mean)
    logger.info("%s: mean ratio %s over %d points", name, mean, len(values))
    return ResidualStats(
        name=name, eq_ref=eq_ref, n_points=len(values),
        max_abs=float(deviation.max()), max_rel=float(deviation.max()) / abs(mean),
        mean_abs=float(deviation.mean()), tol=tol, n_skipped=skipped,
    )


def ladder_raising(state: Eigenstate, cloud: SampleCloud, tol: float = 1e-10) -> ResidualStats:
    """Spread of â_i†ψ₀ / φ_i over the cloud, φ_i the axis-i first excited state."""
    _require_oscillator_ground(state)
    points = ladder_cloud(state, cloud)
    field = FieldHandle.from_state(state)
    p = MapParams.for_state(state)
    worst: ResidualStats | None = None
    for axis in range(3):
        excited = cartesian_first_excited(state.scales, axis)
        ratios: list[complex] = []
        skipped = 0
        for x, t in points:
            if abs(x[axis]) < AXIS_FRACTION * float(np.linalg.norm(x)):
                continue
            try:
                raised = ladder_apply(field, x, t, axis, OperatorKind.LADDER_RAISE, p)
                ratios.append(raised / excited(x))
            except GUARDS:
                skipped += 1
        stats = _spread(f"ladder_raising[axis={axis}]", RAISING, ratios, tol, skipped)
        if worst is None or not stats.max_rel <= worst.max_rel:
            worst = stats
    assert worst is not None
    return worst.model_copy(update={"name": "ladder_raising"})


def ladder_commutator_check(
    state: Eigenstate, cloud: SampleCloud, tol: float = 1e-9,
) -> ResidualStats:
    """[â_i, â_i†]ψ₀ / ψ₀ must be one constant over the cloud for every axis."""
    _require_oscillator_ground(state)
    points = ladder_cloud(state, cloud)
    field = FieldHandle.from_state(state)
    p = MapParams.for_state(state)
    ratios: list[complex] = []
    skipped = 0
    for x, t in points:
        try:
            psi = field.value(x, t)
            ratios.extend(ladder_commutator(field, x, t, i, p) / psi for i in range(3))
        except GUARDS:
            skipped += 1
    return _spread("ladder_commutator", COMMUTATOR, ratios, tol, skipped)
