"""Seeded low-discrepancy sample clouds and residual accumulation."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import NDArray
from scipy.stats import qmc

from conformal_qm.core.eigenstates import Eigenstate
from conformal_qm.core.result import Basis, ResidualStats
from conformal_qm.core.units import System
from conformal_qm.errors import CloudError, ConformalQMError, InvalidInputError

logger = logging.getLogger(__name__)

AXIS_MARGIN = 0.05
HYDROGEN_RADII = (0.05, 12.0)
OSCILLATOR_RADII = (0.05, 3.0)
SKIP_LIMIT = 0.10
NODE_EXCLUSION = 1e-12
LOCAL_FLOOR = 1e-5


@dataclass(frozen=True)
class SampleCloud:
    """Spacetime points (x, t) off the origin and the polar axis.

    Points come from an unscrambled 4-d Halton sequence with a Cranley-Patterson
    shift drawn from a Philox generator, so the same seed reproduces the same
    cloud on every platform.
    """

    positions: NDArray[np.float64]
    times: NDArray[np.float64]
    seed: int
    r_range: tuple[float, float]
    axis_margin: float = AXIS_MARGIN

    @classmethod
    def generate(
        cls, n_points: int, seed: int, r_range: tuple[float, float], period: float,
        axis_margin: float = AXIS_MARGIN,
    ) -> SampleCloud:
        r_lo, r_hi = r_range
        if n_points < 0:
            raise InvalidInputError(f"n_points must be non-negative, got {n_points}")
        if not 0 < r_lo < r_hi:
            raise InvalidInputError(f"radial range must satisfy 0 < r_min < r_max, got {r_range}")
        if not 0 < axis_margin < math.pi / 2:
            raise InvalidInputError(f"axis margin must be in (0, pi/2), got {axis_margin}")
        if n_points == 0:
            return cls(np.empty((0, 3)), np.empty(0), seed, (r_lo, r_hi), axis_margin)

        shift = np.random.Generator(np.random.Philox(seed)).random(4)
        u = (qmc.Halton(d=4, scramble=False).random(n_points) + shift) % 1.0
        r = r_lo + (r_hi - r_lo) * u[:, 0]
        cos_theta = math.cos(axis_margin) * (2.0 * u[:, 1] - 1.0)
        sin_theta = np.sqrt(1.0 - cos_theta**2)
        phi = 2.0 * math.pi * u[:, 2]
        positions = np.column_stack([
            r * sin_theta * np.cos(phi),
            r * sin_theta * np.sin(phi),
            r * cos_theta,
        ])
        return cls(positions, period * u[:, 3], seed, (r_lo, r_hi), axis_margin)

    @classmethod
    def for_state(cls, state: Eigenstate, n_points: int, seed: int) -> SampleCloud:
        """Hydrogen: r in [0.05, 12]·nα₀. Oscillator: r in [0.05, 3]·r_tp, r_tp = b√(E/ħω)."""
        scales = state.scales
        if state.system is System.HYDROGEN:
            assert scales.alpha0 is not None
            unit = state.qn.n * scales.alpha0
            lo, hi = HYDROGEN_RADII
        else:
            assert scales.omega is not None
            level = scales.energy_level(n_r=state.qn.n, l=state.qn.l)
            unit = scales.b * math.sqrt(level / (scales.hbar * scales.omega))
            lo, hi = OSCILLATOR_RADII
        period = 2.0 * math.pi * scales.hbar / abs(state.energy)
        return cls.generate(n_points, seed, (lo * unit, hi * unit), period)

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[tuple[NDArray[np.float64], float]]:
        for x, t in zip(self.positions, self.times):
            yield x, float(t)

    @property
    def radii(self) -> NDArray[np.float64]:
        return np.linalg.norm(self.positions, axis=1)

    def within(self, r_max: float) -> SampleCloud:
        keep = self.radii <= r_max
        return replace(self, positions=self.positions[keep], times=self.times[keep])

    def at_time(self, t: float) -> SampleCloud:
        return replace(self, times=np.full_like(self.times, t))


def conditioned(reference: float, local: float) -> float:
    """Denominator for relative residuals: |reference| floored by the local term size."""
    return max(reference, LOCAL_FLOOR * local)


@dataclass
class ResidualAccumulator:
    """Collects pointwise residuals and turns them into ResidualStats.

    Points whose amplitude is below NODE_EXCLUSION times the cloud's peak are
    kept in the absolute statistics but left out of the relative ones.
    """

    name: str
    eq_ref: str
    tol: float
    requested: int
    basis: Basis = Basis.RELATIVE
    skipped: int = 0
    _residuals: list[float] = field(default_factory=list)
    _references: list[float] = field(default_factory=list)
    _amplitudes: list[float] = field(default_factory=list)

    def add(self, residual: float, reference: float, amplitude: float | None = None) -> None:
        self._residuals.append(float(residual))
        self._references.append(float(reference))
        self._amplitudes.append(math.nan if amplitude is None else float(amplitude))

    def skip(self, exc: ConformalQMError) -> None:
        self.skipped += 1
        logger.debug("%s: skipped point (%s)", self.name, exc)

    def stats(self) -> ResidualStats:
        if self.skipped:
            logger.warning("%s: %d of %d points skipped", self.name, self.skipped, self.requested)
        if self.skipped > SKIP_LIMIT * self.requested:
            raise CloudError(
                f"{self.name}: {self.skipped} of {self.requested} points violated evaluation guards"
            )
        if not self._residuals:
            return ResidualStats(name=self.name, eq_ref=self.eq_ref, tol=self.tol,
                                 basis=self.basis, n_skipped=self.skipped)

        residuals = np.array(self._residuals)
        references = np.array(self._references)
        amplitudes = np.array(self._amplitudes)
        with np.errstate(divide="ignore", invalid="ignore"):
            relative = np.where(references > 0, residuals / references,
                                np.where(residuals == 0, 0.0, np.inf))
        measured = ~np.isnan(amplitudes)
        peak = float(amplitudes[measured].max()) if measured.any() else 0.0
        keep = ~measured | (amplitudes >= NODE_EXCLUSION * peak)
        return ResidualStats(
            name=self.name,
            eq_ref=self.eq_ref,
            n_points=len(residuals),
            max_abs=float(residuals.max()),
            max_rel=float(relative[keep].max()) if keep.any() else 0.0,
            mean_abs=float(residuals.mean()),
            tol=self.tol,
            basis=self.basis,
            n_skipped=self.skipped,
        )
