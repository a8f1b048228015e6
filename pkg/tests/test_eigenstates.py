import math

import numpy as np
import pytest

from conformal_qm.core.eigenstates import (
    QuantumNumbers,
    amplitude,
    cnl_closed_form,
    count_radial_nodes,
    evaluate,
    hydrogen_quantum_numbers,
    hydrogen_state,
    make_state,
    normalization_check,
    oscillator_quantum_numbers,
    oscillator_state,
    overlap,
    radial_residual,
    radial_value,
    transformed_radial,
)
from conformal_qm.core.units import ATOMIC, System, derive_scales
from conformal_qm.errors import InvalidInputError, InvalidQuantumNumbersError, SingularityError

HYDROGEN = derive_scales(ATOMIC, "hydrogen")
OSCILLATOR = derive_scales(ATOMIC, "oscillator")


def test_hydrogen_ground_state_norm():
    state = hydrogen_state(HYDROGEN, QuantumNumbers(1, 0, 0))
    assert state.energy == pytest.approx(-0.5)
    assert state.radial_norm == pytest.approx(2.0, rel=1e-10)
    assert state.is_ground
    assert state.label == "hydrogen(1,0,0)"


@pytest.mark.parametrize("qn", [(1, 0, 0), (2, 1, -1), (3, 2, 2), (4, 3, 0)])
def test_hydrogen_normalization(qn):
    state = hydrogen_state(HYDROGEN, QuantumNumbers(*qn))
    assert normalization_check(state) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("qn", [(0, 0, 0), (1, 0, 0), (0, 2, 1), (2, 1, -1)])
def test_oscillator_normalization(qn):
    state = oscillator_state(OSCILLATOR, QuantumNumbers(*qn))
    assert normalization_check(state) == pytest.approx(1.0, abs=1e-8)


def test_oscillator_energies():
    assert oscillator_state(OSCILLATOR, QuantumNumbers(0, 0, 0)).energy == pytest.approx(1.5)
    assert oscillator_state(OSCILLATOR, QuantumNumbers(1, 2, 0)).energy == pytest.approx(5.5)


def test_overlaps_vanish_between_distinct_states():
    a = hydrogen_state(HYDROGEN, QuantumNumbers(1, 0, 0))
    b = hydrogen_state(HYDROGEN, QuantumNumbers(2, 0, 0))
    c = hydrogen_state(HYDROGEN, QuantumNumbers(2, 1, 0))
    d = hydrogen_state(HYDROGEN, QuantumNumbers(2, 1, 1))
    assert abs(overlap(a, b)) < 1e-9
    assert abs(overlap(c, d)) < 1e-12
    assert overlap(c, c).real == pytest.approx(1.0, abs=1e-8)


def test_oscillator_radial_overlap_vanishes():
    ground = oscillator_state(OSCILLATOR, QuantumNumbers(0, 0, 0))
    excited = oscillator_state(OSCILLATOR, QuantumNumbers(1, 0, 0))
    assert abs(overlap(ground, excited)) < 1e-8


@pytest.mark.parametrize("qn,nodes", [((1, 0, 0), 0), ((3, 0, 0), 2), ((3, 1, 0), 1), ((4, 1, 0), 2)])
def test_hydrogen_radial_nodes(qn, nodes):
    assert count_radial_nodes(hydrogen_state(HYDROGEN, QuantumNumbers(*qn))) == nodes


def test_oscillator_radial_nodes():
    assert count_radial_nodes(oscillator_state(OSCILLATOR, QuantumNumbers(2, 1, 0))) == 2


@pytest.mark.parametrize("system,qn", [
    ("hydrogen", (3, 1, 0)),
    ("hydrogen", (4, 2, 1)),
    ("oscillator", (1, 1, 0)),
    ("oscillator", (2, 0, 0)),
])
def test_radial_equation_satisfied(system, qn):
    scales = derive_scales(ATOMIC, system)
    state = make_state(scales, QuantumNumbers(*qn))
    r = np.linspace(0.2, 6.0, 30) * scales.b
    residual = np.abs(radial_residual(state, r))
    scale = abs(state.energy) * float(np.max(np.abs(radial_value(state, r))))
    assert float(residual.max()) <= 1e-10 * scale


@pytest.mark.parametrize("scales", [HYDROGEN, OSCILLATOR])
def test_radial_residual_scalar_matches_array(scales):
    state = make_state(scales, QuantumNumbers(2, 1, 0))
    r = np.array([0.4, 1.3, 3.7]) * scales.b
    array = radial_residual(state, r)
    for i, ri in enumerate(r):
        value = radial_residual(state, float(ri))
        assert isinstance(value, float)
        assert value == pytest.approx(float(array[i]), rel=1e-12, abs=1e-15)


def test_evaluate_satisfies_schrodinger_at_a_point():
    state = hydrogen_state(HYDROGEN, QuantumNumbers(3, 2, -1))
    x = np.array([1.3, -0.7, 2.1])
    jet = evaluate(state, x, 0.9)
    r = float(np.linalg.norm(x))
    lhs = -0.5 * jet.laplacian - jet.psi / r
    assert abs(lhs - state.energy * jet.psi) <= 1e-12 * jet.laplacian_scale
    assert jet.dt == pytest.approx(-1j * state.energy * jet.psi)
    assert jet.psi == pytest.approx(amplitude(state, x, 0.9))


def test_evaluate_gradient_matches_differences():
    state = oscillator_state(OSCILLATOR, QuantumNumbers(0, 2, 1))
    x = np.array([0.4, 0.9, -0.3])
    jet = evaluate(state, x, 0.0)
    h = 1e-6
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        fd = (amplitude(state, x + e, 0.0) - amplitude(state, x - e, 0.0)) / (2 * h)
        assert jet.grad[i] == pytest.approx(fd, abs=1e-8)


def test_origin_is_singular():
    state = hydrogen_state(HYDROGEN, QuantumNumbers(1, 0, 0))
    with pytest.raises(SingularityError):
        evaluate(state, [0.0, 0.0, 0.0], 0.0)


@pytest.mark.parametrize("qn", [(0, 0, 0), (1, 1, 0), (2, 1, 2), (12, 9, 0)])
def test_invalid_hydrogen_numbers(qn):
    with pytest.raises(InvalidQuantumNumbersError):
        hydrogen_state(HYDROGEN, QuantumNumbers(*qn))


def test_invalid_oscillator_numbers():
    with pytest.raises(InvalidQuantumNumbersError):
        oscillator_state(OSCILLATOR, QuantumNumbers(-1, 0, 0))


def test_scales_must_match_system():
    with pytest.raises(InvalidInputError):
        hydrogen_state(OSCILLATOR, QuantumNumbers(1, 0, 0))


def test_transformed_radial_ground_state_is_constant():
    state = hydrogen_state(HYDROGEN, QuantumNumbers(1, 0, 0))
    r = np.linspace(0.01, 12.0, 50)
    np.testing.assert_allclose(transformed_radial(state, r), 2.0, rtol=1e-10)


def test_transformed_radial_excited_state():
    state = hydrogen_state(HYDROGEN, QuantumNumbers(2, 0, 0))
    r = np.linspace(0.1, 8.0, 20)
    np.testing.assert_allclose(transformed_radial(state, r), radial_value(state, r) * np.exp(r),
                               rtol=1e-12)


def test_closed_form_constant_pairs_by_factorial():
    for n in range(1, 4):
        for l in range(n):
            numeric = hydrogen_state(HYDROGEN, QuantumNumbers(n, l, 0)).radial_norm
            ratio = numeric / cnl_closed_form(HYDROGEN, n, l)
            assert ratio == pytest.approx(math.factorial(n + l), rel=1e-9)


def test_quantum_number_enumeration():
    hydrogen = list(hydrogen_quantum_numbers(3))
    assert len(hydrogen) == 14
    assert hydrogen[0] == QuantumNumbers(1, 0, 0)
    oscillator = list(oscillator_quantum_numbers(2))
    assert len(oscillator) == 10
    assert all(2 * qn.n + qn.l <= 2 for qn in oscillator)
    for qn in oscillator:
        qn.validate(System.OSCILLATOR)


def test_with_energy_replaces_only_energy():
    state = hydrogen_state(HYDROGEN, QuantumNumbers(2, 1, 0))
    shifted = state.with_energy(-0.2)
    assert shifted.energy == -0.2
    assert shifted.radial_norm == state.radial_norm
