"""Abstract check base class."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import StrEnum

from conformal_qm.core.eigenstates import Eigenstate
from conformal_qm.core.result import ConventionRatio, ResidualStats, SuiteConfig
from conformal_qm.core.units import DerivedScales, System


class Scope(StrEnum):
    """A check runs once per eigenstate or once per suite."""

    STATE = "state"
    GLOBAL = "global"


@dataclass
class CheckContext:
    """Shared inputs of one suite run."""

    config: SuiteConfig
    scales: dict[System, DerivedScales]
    states: list[Eigenstate] = field(default_factory=list)
    convention_ratios: list[ConventionRatio] = field(default_factory=list)


class Check(ABC):
    """Base class for all verification checks."""

    name: str = ""
    eq_ref: str = ""
    scope: Scope = Scope.STATE
    systems: tuple[System, ...] = (System.HYDROGEN, System.OSCILLATOR)

    def applies(self, ctx: CheckContext, state: Eigenstate | None = None) -> bool:
        """Whether this check has anything to verify in the given context."""
        if state is not None:
            return state.system in self.systems
        return any(system in ctx.scales for system in self.systems)

    def tolerance(self, ctx: CheckContext) -> float:
        """Threshold recorded when the check raises before producing statistics."""
        return ctx.config.tolerances.analytic

    def label(self, state: Eigenstate | None = None) -> str:
        return f"{self.name}[{state.label}]" if state is not None else self.name

    @abstractmethod
    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        """Run this check and return one or more residual records."""
        ...
