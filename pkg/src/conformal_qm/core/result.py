"""Residual statistics, suite settings and the verification report."""

from __future__ import annotations

import csv
import io
import json
import math
from enum import StrEnum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, computed_field

from conformal_qm.core.units import ATOMIC, PhysicalConstants, System

REPORT_CHECK_KEYS = ("name", "eq_ref", "n_points", "max_abs", "max_rel", "tol", "pass", "error")
CSV_DIGITS = 12


class Basis(StrEnum):
    """Which statistic decides the verdict."""

    RELATIVE = "relative"
    ABSOLUTE = "absolute"


class ResidualStats(BaseModel):
    """Residual statistics of one check over its sample points."""

    model_config = ConfigDict(frozen=True)

    name: str
    eq_ref: str
    n_points: int = 0
    max_abs: float = 0.0
    max_rel: float = 0.0
    mean_abs: float = 0.0
    tol: float
    basis: Basis = Basis.RELATIVE
    n_skipped: int = 0
    error: str | None = None

    @computed_field(alias="pass")  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        """max_rel (or max_abs on an absolute basis) within tol, and no error."""
        if self.error is not None:
            return False
        value = self.max_rel if self.basis is Basis.RELATIVE else self.max_abs
        return math.isfinite(value) and value <= self.tol

    @classmethod
    def failed(cls, name: str, eq_ref: str, tol: float, error: str) -> ResidualStats:
        return cls(name=name, eq_ref=eq_ref, tol=tol, max_abs=math.nan,
                   max_rel=math.nan, mean_abs=math.nan, error=error)


class ConventionRatio(BaseModel):
    """Numeric radial normalization against the closed-form constant for one (n, l)."""

    model_config = ConfigDict(frozen=True)

    n: int
    l: int
    numeric: float
    closed_form: float
    ratio: float
    factorial: int

    @computed_field  # type: ignore[prop-decorator]
    @property
    def pairing(self) -> str:
        """'direct' when the ratio is 1, 'factorial' when it is (n+l)!, else 'mismatch'."""
        if abs(self.ratio - 1.0) <= 1e-9:
            return "direct"
        if abs(self.ratio / self.factorial - 1.0) <= 1e-9:
            return "factorial"
        return "mismatch"


class ToleranceSet(BaseModel):
    """Pass thresholds per residual family."""

    model_config = ConfigDict(frozen=True)

    analytic: float = Field(default=1e-9, gt=0)
    fd: float = Field(default=1e-5, gt=0)
    exact: float = Field(default=1e-12, gt=0)
    normalization: float = Field(default=1e-8, gt=0)


StateTuple = tuple[int, int, int]


def _default_hydrogen() -> list[StateTuple]:
    return [(n, l, k) for n in range(1, 4) for l in range(n) for k in range(-l, l + 1)]


class SuiteConfig(BaseModel):
    """Everything that determines a verification run."""

    model_config = ConfigDict(frozen=True)

    name: str = "default"
    units: str = "atomic"
    constants: PhysicalConstants = ATOMIC
    hydrogen: list[StateTuple] = Field(default_factory=_default_hydrogen)
    oscillator: list[StateTuple] = Field(default_factory=lambda: [(0, 0, 0), (1, 0, 0), (0, 2, 1)])
    n_points: int = Field(default=200, ge=1)
    seed: int = 42
    tolerances: ToleranceSet = Field(default_factory=ToleranceSet)
    convention_n_max: int = Field(default=4, ge=1)
    energy_scale: float = 1.0

    @property
    def systems(self) -> list[System]:
        found = []
        if self.hydrogen:
            found.append(System.HYDROGEN)
        if self.oscillator:
            found.append(System.OSCILLATOR)
        return found

    @property
    def is_empty(self) -> bool:
        return not self.hydrogen and not self.oscillator


def _finite_or_none(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


class VerificationReport(BaseModel):
    """Aggregated outcome of a suite run. Contains no timestamps."""

    suite: str
    units: str
    seed: int
    checks: list[ResidualStats] = []
    convention_ratios: list[ConventionRatio] = []

    @computed_field  # type: ignore[prop-decorator]
    @property
    def no_checks(self) -> bool:
        return not self.checks

    @computed_field  # type: ignore[prop-decorator]
    @property
    def overall_pass(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[ResidualStats]:
        return [c for c in self.checks if not c.passed]

    @property
    def summary(self) -> str:
        if self.no_checks:
            return "No checks were run"
        passed = len(self.checks) - len(self.failures)
        return f"{passed}/{len(self.checks)} checks passed"

    def to_dict(self) -> dict[str, Any]:
        checks = []
        for check in self.checks:
            row = check.model_dump(by_alias=True)
            checks.append({key: _finite_or_none(row[key]) for key in REPORT_CHECK_KEYS})
        return {
            "suite": self.suite,
            "units": self.units,
            "seed": self.seed,
            "checks": checks,
            "overall_pass": self.overall_pass,
            "no_checks": self.no_checks,
            "convention_ratios": [
                {k: _finite_or_none(v) for k, v in ratio.model_dump().items()}
                for ratio in self.convention_ratios
            ],
        }

    def to_json(self) -> str:
        """JSON with shortest round-trip floats; NaN is written as null."""
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(REPORT_CHECK_KEYS)
        for row in self.to_dict()["checks"]:
            writer.writerow([_csv_cell(row[key]) for key in REPORT_CHECK_KEYS])
        return buffer.getvalue()


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{CSV_DIGITS}g}"
    return str(value)
