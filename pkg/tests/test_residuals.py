import pytest

from conformal_qm.checks import residuals
from conformal_qm.checks.cloud import SampleCloud
from conformal_qm.core.eigenstates import QuantumNumbers, hydrogen_state, oscillator_state
from conformal_qm.core.units import ATOMIC, derive_scales
from conformal_qm.errors import UnsupportedSystemError

HYDROGEN = derive_scales(ATOMIC, "hydrogen")
OSCILLATOR = derive_scales(ATOMIC, "oscillator")


def _cloud(state, n=40):
    return SampleCloud.for_state(state, n, 42)


@pytest.mark.parametrize("qn", [(1, 0, 0), (2, 1, 1), (3, 2, -2)])
def test_hydrogen_schrodinger_residual_passes(qn):
    state = hydrogen_state(HYDROGEN, QuantumNumbers(*qn))
    stats = residuals.residual_schrodinger(state, _cloud(state))
    assert stats.passed, stats
    assert stats.n_points == 40
    assert stats.name == f"schrodinger[hydrogen{qn}]".replace(" ", "")


@pytest.mark.parametrize("qn", [(0, 0, 0), (1, 0, 0), (0, 2, 1)])
def test_oscillator_schrodinger_residual_passes(qn):
    state = oscillator_state(OSCILLATOR, QuantumNumbers(*qn))
    assert residuals.residual_schrodinger(state, _cloud(state)).passed


def test_wrong_energy_is_detected():
    state = hydrogen_state(HYDROGEN, QuantumNumbers(1, 0, 0))
    wrong = state.with_energy(state.energy * 1.01)
    stats = residuals.residual_schrodinger(wrong, _cloud(wrong))
    assert not stats.passed
    assert stats.max_rel > 1e-3


def test_transformed_residual_ground_state_exact():
    state = hydrogen_state(HYDROGEN, QuantumNumbers(1, 0, 0))
    assert residuals.residual_transformed(state, _cloud(state), tol=1e-12).passed


@pytest.mark.parametrize("qn", [(2, 0, 0), (3, 1, -1)])
def test_transformed_residual_excited_states(qn):
    state = hydrogen_state(HYDROGEN, QuantumNumbers(*qn))
    assert residuals.residual_transformed(state, _cloud(state)).passed


def test_operator_identity_hydrogen_only():
    state = hydrogen_state(HYDROGEN, QuantumNumbers(2, 1, 0))
    assert residuals.residual_operator_identity(state, _cloud(state)).passed
    oscillator = oscillator_state(OSCILLATOR, QuantumNumbers(0, 0, 0))
    with pytest.raises(UnsupportedSystemError):
        residuals.residual_operator_identity(oscillator, _cloud(oscillator))


def test_wavefunction_consistency():
    state = hydrogen_state(HYDROGEN, QuantumNumbers(2, 1, -1))
    assert residuals.wavefunction_consistency(state, _cloud(state, 20)).passed


def test_jet_and_mixed_derivative_agree_with_differences():
    state = hydrogen_state(HYDROGEN, QuantumNumbers(2, 1, 1))
    assert residuals.jet_consistency(state, _cloud(state, 15)).passed
    assert residuals.mixed_derivative_consistency(state, _cloud(state, 10)).passed


def test_normalization_stats():
    state = oscillator_state(OSCILLATOR, QuantumNumbers(1, 1, 0))
    stats = residuals.normalization_stats(state)
    assert stats.passed
    assert stats.n_points == 1


def test_map_roundtrip():
    state = oscillator_state(OSCILLATOR, QuantumNumbers(0, 0, 0))
    stats = residuals.map_roundtrip(state, _cloud(state, 30))
    assert stats.passed
    assert stats.max_abs <= 1e-13
