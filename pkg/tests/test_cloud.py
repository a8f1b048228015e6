import math

import numpy as np
import pytest

from conformal_qm.checks.cloud import (
    ResidualAccumulator,
    SampleCloud,
    conditioned,
)
from conformal_qm.core.eigenstates import QuantumNumbers, make_state
from conformal_qm.core.result import Basis
from conformal_qm.core.units import ATOMIC, derive_scales
from conformal_qm.errors import CloudError, InvalidInputError, SingularityError


def test_same_seed_same_cloud():
    a = SampleCloud.generate(50, 42, (0.1, 5.0), period=2.0)
    b = SampleCloud.generate(50, 42, (0.1, 5.0), period=2.0)
    np.testing.assert_array_equal(a.positions, b.positions)
    np.testing.assert_array_equal(a.times, b.times)


def test_different_seed_different_cloud():
    a = SampleCloud.generate(20, 1, (0.1, 5.0), period=2.0)
    b = SampleCloud.generate(20, 2, (0.1, 5.0), period=2.0)
    assert not np.allclose(a.positions, b.positions)


def test_cloud_avoids_origin_and_axis():
    cloud = SampleCloud.generate(500, 7, (0.2, 4.0), period=3.0, axis_margin=0.05)
    radii = cloud.radii
    assert radii.min() >= 0.2 - 1e-12
    assert radii.max() <= 4.0 + 1e-12
    assert np.all(np.abs(cloud.positions[:, 2]) / radii <= math.cos(0.05) + 1e-12)
    assert np.all((cloud.times >= 0.0) & (cloud.times < 3.0))


def test_cloud_helpers():
    cloud = SampleCloud.generate(100, 3, (0.1, 2.0), period=1.0)
    inner = cloud.within(1.0)
    assert 0 < len(inner) < len(cloud)
    assert np.all(inner.radii <= 1.0)
    assert len(inner.times) == len(inner)
    assert np.all(cloud.at_time(0.0).times == 0.0)
    assert len(list(cloud)) == 100


def test_empty_cloud():
    assert len(SampleCloud.generate(0, 1, (0.1, 1.0), period=1.0)) == 0


@pytest.mark.parametrize("args", [(-1, (0.1, 1.0)), (5, (0.0, 1.0)), (5, (2.0, 1.0))])
def test_invalid_cloud(args):
    n, r_range = args
    with pytest.raises(InvalidInputError):
        SampleCloud.generate(n, 1, r_range, period=1.0)


def test_hydrogen_cloud_scales_with_n():
    state = make_state(derive_scales(ATOMIC, "hydrogen"), QuantumNumbers(2, 1, 0))
    cloud = SampleCloud.for_state(state, 200, 42)
    assert cloud.r_range == pytest.approx((0.1, 24.0))


def test_oscillator_cloud_uses_turning_radius():
    scales = derive_scales(ATOMIC, "oscillator")
    state = make_state(scales, QuantumNumbers(0, 0, 0))
    cloud = SampleCloud.for_state(state, 10, 42)
    turning = scales.b * math.sqrt(1.5)
    assert cloud.r_range == pytest.approx((0.05 * turning, 3.0 * turning))


def test_conditioned_floor():
    assert conditioned(1.0, 10.0) == 1.0
    assert conditioned(0.0, 10.0) == pytest.approx(1e-4)


def test_accumulator_statistics():
    acc = ResidualAccumulator("demo", "x = x", 1e-9, 3)
    acc.add(1e-12, 1.0, 1.0)
    acc.add(4e-12, 2.0, 0.5)
    acc.add(0.0, 0.0, 0.2)
    stats = acc.stats()
    assert stats.n_points == 3
    assert stats.max_abs == 4e-12
    assert stats.max_rel == pytest.approx(2e-12)
    assert stats.passed


def test_accumulator_excludes_nodes_from_relative_stats():
    acc = ResidualAccumulator("demo", "x = x", 1e-9, 2)
    acc.add(1e-14, 1e-14, 1e-20)
    acc.add(1e-12, 1.0, 1.0)
    stats = acc.stats()
    assert stats.max_rel == pytest.approx(1e-12)
    assert stats.max_abs == pytest.approx(1e-12)


def test_accumulator_absolute_basis():
    acc = ResidualAccumulator("demo", "x = x", 1e-13, 1, basis=Basis.ABSOLUTE)
    acc.add(1e-14, 1.0)
    assert acc.stats().passed


def test_accumulator_tolerates_few_skips(caplog):
    acc = ResidualAccumulator("demo", "x = x", 1e-9, 20)
    acc.skip(SingularityError("near origin"))
    for _ in range(19):
        acc.add(0.0, 1.0, 1.0)
    with caplog.at_level("WARNING", logger="conformal_qm"):
        stats = acc.stats()
    assert stats.n_skipped == 1
    assert "1 of 20 points skipped" in caplog.text


def test_accumulator_rejects_many_skips():
    acc = ResidualAccumulator("demo", "x = x", 1e-9, 10)
    for _ in range(2):
        acc.skip(SingularityError("near origin"))
    with pytest.raises(CloudError):
        acc.stats()
