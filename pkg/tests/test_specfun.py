import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre

from conformal_qm.core.quadrature import angular_grid
from conformal_qm.core.specfun import laguerre, spherical_harmonic
from conformal_qm.errors import DomainError, PoleProximityError


def test_laguerre_known_value():
    # L_2^(1)(x) = 3 - 3x + x²/2
    assert laguerre(2, 1.0, 2.0).value == pytest.approx(-1.0, abs=1e-15)
    assert laguerre(0, 3.0, 7.0).value == 1.0
    assert laguerre(1, 0.5, 1.0).value == pytest.approx(0.5)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(min_value=0, max_value=8),
    alpha=st.floats(min_value=-0.5, max_value=8.0),
    x=st.floats(min_value=0.0, max_value=10.0),
)
def test_laguerre_matches_scipy(n, alpha, x):
    ours = laguerre(n, alpha, x)
    scale = max(1.0, abs(float(eval_genlaguerre(n, alpha, x))))
    assert abs(ours.value - eval_genlaguerre(n, alpha, x)) <= 1e-9 * scale
    if n >= 1:
        ref = -eval_genlaguerre(n - 1, alpha + 1, x)
        assert abs(ours.derivative - ref) <= 1e-9 * max(1.0, abs(ref))


def test_laguerre_vectorized():
    x = np.linspace(0.0, 10.0, 11)
    result = laguerre(3, 2.0, x)
    np.testing.assert_allclose(result.value, eval_genlaguerre(3, 2.0, x), rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(result.second, eval_genlaguerre(1, 4.0, x), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("args", [(-1, 0.0, 1.0), (61, 0.0, 1.0), (2, -1.0, 1.0), (2, 0.0, -0.5)])
def test_laguerre_domain(args):
    with pytest.raises(DomainError):
        laguerre(*args)


def test_spherical_harmonic_closed_forms():
    theta, phi = 0.7, 1.3
    assert spherical_harmonic(0, 0, theta, phi).value == pytest.approx(1 / math.sqrt(4 * math.pi))
    assert spherical_harmonic(1, 0, theta, phi).value == pytest.approx(
        math.sqrt(3 / (4 * math.pi)) * math.cos(theta))
    plus = spherical_harmonic(1, 1, theta, phi).value
    minus = spherical_harmonic(1, -1, theta, phi).value
    amplitude = math.sqrt(3 / (8 * math.pi)) * math.sin(theta)
    assert plus == pytest.approx(-amplitude * complex(math.cos(phi), math.sin(phi)))
    assert minus == pytest.approx(amplitude * complex(math.cos(phi), -math.sin(phi)))


def test_spherical_harmonics_orthonormal():
    states = [(l, k) for l in range(4) for k in range(-l, l + 1)]
    theta, phi, w = angular_grid(6)
    values = np.array([
        [spherical_harmonic(l, k, float(t), float(p)).value for t, p in zip(theta, phi)]
        for l, k in states
    ])
    gram = (values.conj() * w) @ values.T
    np.testing.assert_allclose(gram, np.eye(len(states)), atol=1e-12)


@pytest.mark.parametrize("l,k", [(1, 0), (2, -1), (3, 2), (4, -4)])
def test_spherical_harmonic_derivatives_match_differences(l, k):
    theta, phi, h = 1.1, 0.4, 1e-5
    result = spherical_harmonic(l, k, theta, phi, derivatives=True)
    fd_theta = (spherical_harmonic(l, k, theta + h, phi).value
                - spherical_harmonic(l, k, theta - h, phi).value) / (2 * h)
    fd_phi = (spherical_harmonic(l, k, theta, phi + h).value
              - spherical_harmonic(l, k, theta, phi - h).value) / (2 * h)
    assert result.dtheta == pytest.approx(fd_theta, abs=1e-8)
    assert result.dphi == pytest.approx(fd_phi, abs=1e-8)


def test_derivatives_refused_near_pole():
    with pytest.raises(PoleProximityError):
        spherical_harmonic(2, 1, 1e-9, 0.0, derivatives=True)
    # values alone are fine on the axis
    assert spherical_harmonic(2, 0, 0.0, 0.0).value == pytest.approx(math.sqrt(5 / (4 * math.pi)))


def test_harmonic_domain():
    with pytest.raises(DomainError):
        spherical_harmonic(9, 0, 1.0, 0.0)
    with pytest.raises(DomainError):
        spherical_harmonic(2, 3, 1.0, 0.0)


def _seeded_angles(count, seed=7):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.1, math.pi - 0.1, count), rng.uniform(0.0, 2 * math.pi, count)


@pytest.mark.parametrize("l", range(9))
def test_negative_order_is_signed_conjugate(l):
    thetas, phis = _seeded_angles(20)
    for k in range(l + 1):
        for theta, phi in zip(thetas, phis):
            plus = spherical_harmonic(l, k, theta, phi).value
            minus = spherical_harmonic(l, -k, theta, phi).value
            assert abs(minus - (-1) ** k * plus.conjugate()) <= 1e-13


@pytest.mark.parametrize("l", range(9))
def test_zonal_harmonic_magnitude_ignores_phi(l):
    thetas, _ = _seeded_angles(10)
    for theta in thetas:
        magnitudes = [abs(spherical_harmonic(l, 0, theta, phi).value)
                      for phi in np.linspace(0.0, 2 * math.pi, 13)]
        assert max(magnitudes) - min(magnitudes) <= 1e-15


def test_laguerre_three_term_recurrence():
    rng = np.random.default_rng(42)
    for n, alpha, x in zip(rng.integers(1, 20, 100), rng.uniform(-0.9, 5.0, 100),
                           rng.uniform(0.0, 20.0, 100)):
        n = int(n)
        lower, mid, upper = (laguerre(k, alpha, x).value for k in (n - 1, n, n + 1))
        lhs = (n + 1) * upper
        rhs = (2 * n + 1 + alpha - x) * mid - (n + alpha) * lower
        scale = abs(lhs) + abs((2 * n + 1 + alpha - x) * mid) + abs((n + alpha) * lower)
        assert abs(lhs - rhs) <= 1e-12 * max(scale, 1.0)


@pytest.mark.parametrize("n,alpha", [(1, 0.0), (3, 1.0), (5, 2.5), (8, 0.5)])
def test_laguerre_derivatives_match_central_differences(n, alpha):
    x = np.linspace(0.1, 20.0, 100)
    h = 1e-5
    ev = laguerre(n, alpha, x)
    above, below = laguerre(n, alpha, x + h), laguerre(n, alpha, x - h)
    first = (above.value - below.value) / (2 * h)
    second = (above.derivative - below.derivative) / (2 * h)
    scale = np.maximum.reduce([np.abs(ev.value), np.abs(ev.derivative), np.abs(ev.second),
                               np.ones_like(x)])
    assert np.all(np.abs(first - ev.derivative) <= 1e-6 * scale)
    assert np.all(np.abs(second - ev.second) <= 1e-6 * scale)
