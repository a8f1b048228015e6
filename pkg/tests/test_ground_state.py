import numpy as np
import pytest

from conformal_qm.checks.cloud import SampleCloud
from conformal_qm.checks.ground_state import (
    cartesian_first_excited,
    ground_state_condition,
    ladder_cloud,
    ladder_commutator_check,
    ladder_lowering,
    ladder_raising,
)
from conformal_qm.core.eigenstates import QuantumNumbers, hydrogen_state, oscillator_state
from conformal_qm.core.units import ATOMIC, derive_scales
from conformal_qm.errors import InvalidStateError, UnsupportedSystemError

HYDROGEN = derive_scales(ATOMIC, "hydrogen")
OSCILLATOR = derive_scales(ATOMIC, "oscillator")
GROUND = oscillator_state(OSCILLATOR, QuantumNumbers(0, 0, 0))


def _cloud(state, n=60):
    return SampleCloud.for_state(state, n, 42)


@pytest.mark.parametrize("state", [
    hydrogen_state(HYDROGEN, QuantumNumbers(1, 0, 0)),
    GROUND,
], ids=["hydrogen", "oscillator"])
def test_ground_state_condition(state):
    assert ground_state_condition(state, _cloud(state)).passed


def test_ground_state_condition_rejects_excited():
    excited = hydrogen_state(HYDROGEN, QuantumNumbers(2, 0, 0))
    with pytest.raises(InvalidStateError):
        ground_state_condition(excited, _cloud(excited))


def test_ladder_cloud_bounds():
    points = ladder_cloud(GROUND, _cloud(GROUND))
    assert len(points) > 0
    assert np.all(points.radii <= 3.0 * GROUND.length_scale)
    assert np.all(points.times == 0.0)


def test_lowering_annihilates_ground_state():
    assert ladder_lowering(GROUND, _cloud(GROUND)).passed


def test_raising_gives_first_excited():
    stats = ladder_raising(GROUND, _cloud(GROUND))
    assert stats.name == "ladder_raising"
    assert stats.passed


def test_commutator_is_constant():
    assert ladder_commutator_check(GROUND, _cloud(GROUND)).passed


def test_ladder_requires_oscillator_ground():
    hydrogen = hydrogen_state(HYDROGEN, QuantumNumbers(1, 0, 0))
    with pytest.raises(UnsupportedSystemError):
        ladder_lowering(hydrogen, _cloud(hydrogen))
    excited = oscillator_state(OSCILLATOR, QuantumNumbers(1, 0, 0))
    with pytest.raises(InvalidStateError):
        ladder_raising(excited, _cloud(excited))


@pytest.mark.parametrize("axis", [0, 1, 2])
def test_cartesian_first_excited_is_proportional_to_coordinate(axis):
    psi = cartesian_first_excited(OSCILLATOR, axis)
    points = _cloud(GROUND, 10).positions
    ratios = [psi(x) / (x[axis] * np.exp(-x @ x / OSCILLATOR.b**2)) for x in points]
    np.testing.assert_allclose(ratios, ratios[0], rtol=1e-10)
