"""Verification suite orchestration engine."""

from __future__ import annotations

import logging

from conformal_qm.checks.base import Check, CheckContext, Scope
from conformal_qm.checks.registry import CheckRegistry
from conformal_qm.checks.suite import default_registry
from conformal_qm.core.eigenstates import Eigenstate, QuantumNumbers, make_state
from conformal_qm.core.result import ResidualStats, SuiteConfig, VerificationReport
from conformal_qm.core.units import DerivedScales, System, derive_scales
from conformal_qm.errors import ConformalQMError

logger = logging.getLogger(__name__)


class VerificationEngine:
    """Builds the requested eigenstates and runs every registered check on them."""

    def __init__(self, registry: CheckRegistry | None = None) -> None:
        self._registry = registry if registry is not None else default_registry()

    def register_check(self, check: Check) -> None:
        self._registry.register(check)

    def available_checks(self) -> list[str]:
        return self._registry.available()

    def _build_states(
        self, config: SuiteConfig, scales: dict[System, DerivedScales],
    ) -> tuple[list[Eigenstate], list[ResidualStats]]:
        states: list[Eigenstate] = []
        failures: list[ResidualStats] = []
        requested = [(System.HYDROGEN, qn) for qn in config.hydrogen]
        requested += [(System.OSCILLATOR, qn) for qn in config.oscillator]
        for system, numbers in requested:
            qn = QuantumNumbers(*numbers)
            try:
                state = make_state(scales[system], qn)
            except ConformalQMError as exc:
                tag = f"{system.value}({qn.n},{qn.l},{qn.k})"
                logger.warning("could not build %s: %s", tag, exc)
                failures.append(ResidualStats.failed(
                    f"eigenstate[{tag}]", "eigenstate construction",
                    config.tolerances.normalization, str(exc),
                ))
                continue
            if config.energy_scale != 1.0:
                logger.warning("%s: energy scaled by %g for testing", state.label, config.energy_scale)
                state = state.with_energy(state.energy * config.energy_scale)
            states.append(state)
        return states, failures

    def _guarded(self, check: Check, ctx: CheckContext,
                 state: Eigenstate | None = None) -> list[ResidualStats]:
        label = check.label(state)
        logger.debug("running %s", label)
        try:
            results = check.execute(ctx, state)
        except ConformalQMError as exc:
            logger.warning("%s raised %s: %s", label, type(exc).__name__, exc)
            return [ResidualStats.failed(label, check.eq_ref, check.tolerance(ctx), str(exc))]
        for stats in results:
            logger.debug("%s: %d points, max_rel %.3e", stats.name, stats.n_points, stats.max_rel)
        return results

    def run_suite(self, config: SuiteConfig) -> VerificationReport:
        """Run all checks; a failing check is recorded and the suite continues."""
        report = VerificationReport(suite=config.name, units=config.units, seed=config.seed)
        if config.is_empty:
            logger.warning("no quantum numbers requested; nothing to verify")
            return report

        scales = {system: derive_scales(config.constants, system) for system in config.systems}
        states, results = self._build_states(config, scales)
        ctx = CheckContext(config=config, scales=scales, states=states)

        for state in states:
            for check in self._registry.by_scope(Scope.STATE):
                if check.applies(ctx, state):
                    results.extend(self._guarded(check, ctx, state))
        for check in self._registry.by_scope(Scope.GLOBAL):
            if check.applies(ctx):
                results.extend(self._guarded(check, ctx))

        return report.model_copy(update={
            "checks": results, "convention_ratios": ctx.convention_ratios,
        })
