"""Built-in checks composing the default verification suite."""

from __future__ import annotations

import logging
import math

from conformal_qm.checks import ev_relation, ground_state, residuals
from conformal_qm.checks.base import Check, CheckContext, Scope
from conformal_qm.checks.cloud import ResidualAccumulator, SampleCloud
from conformal_qm.checks.registry import CheckRegistry
from conformal_qm.core.conformal import MapParams, coordinate_independence, cr_residual
from conformal_qm.core.eigenstates import (
    Eigenstate,
    QuantumNumbers,
    cnl_closed_form,
    hydrogen_state,
    make_state,
)
from conformal_qm.core.result import Basis, ConventionRatio, ResidualStats
from conformal_qm.core.units import DerivedScales, System

logger = logging.getLogger(__name__)

JET_POINTS = 50
CONSISTENCY_POINTS = 50
MIXED_POINTS = 30
HOLOMORPHY_FD_TOL = 1e-6
INDEPENDENCE_TOL = 1e-14
ROUNDTRIP_TOL = 1e-13
CONVENTION_TOL = 1e-9


def _cloud(ctx: CheckContext, state: Eigenstate, limit: int | None = None) -> SampleCloud:
    n = ctx.config.n_points if limit is None else min(limit, ctx.config.n_points)
    return SampleCloud.for_state(state, n, ctx.config.seed)


def _ground(scales: DerivedScales) -> Eigenstate:
    qn = QuantumNumbers(1, 0, 0) if scales.system is System.HYDROGEN else QuantumNumbers(0, 0, 0)
    return make_state(scales, qn)


class NormalizationCheck(Check):
    name = "normalization"
    eq_ref = residuals.NORMALIZATION

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        assert state is not None
        return [residuals.normalization_stats(state, ctx.config.tolerances.normalization)]


class JetCheck(Check):
    name = "jet_fd"
    eq_ref = residuals.JET

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        assert state is not None
        cloud = _cloud(ctx, state, JET_POINTS)
        return [residuals.jet_consistency(state, cloud, ctx.config.tolerances.fd)]


class SchrodingerCheck(Check):
    name = "schrodinger"
    eq_ref = residuals.SCHRODINGER

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        assert state is not None
        return [residuals.residual_schrodinger(state, _cloud(ctx, state),
                                               ctx.config.tolerances.analytic)]


class TransformedCheck(Check):
    name = "transformed"
    eq_ref = residuals.TRANSFORMED

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        assert state is not None
        tol = ctx.config.tolerances
        return [residuals.residual_transformed(state, _cloud(ctx, state),
                                               tol.exact if state.is_ground else tol.analytic)]


class MixedDerivativeCheck(Check):
    name = "dzdz_fd"
    eq_ref = residuals.MIXED

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        assert state is not None
        cloud = _cloud(ctx, state, MIXED_POINTS)
        return [residuals.mixed_derivative_consistency(state, cloud, ctx.config.tolerances.fd)]


class OperatorIdentityCheck(Check):
    name = "operator_identity"
    eq_ref = residuals.OPERATOR_IDENTITY
    systems = (System.HYDROGEN,)

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        assert state is not None
        return [residuals.residual_operator_identity(state, _cloud(ctx, state),
                                                     ctx.config.tolerances.analytic)]


class WavefunctionConsistencyCheck(Check):
    name = "wavefunction_consistency"
    eq_ref = residuals.CONSISTENCY
    systems = (System.HYDROGEN,)

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        assert state is not None
        cloud = _cloud(ctx, state, CONSISTENCY_POINTS)
        return [residuals.wavefunction_consistency(state, cloud, ctx.config.tolerances.exact)]


class GroundStateCheck(Check):
    name = "ground_state"
    eq_ref = ground_state.GROUND

    def applies(self, ctx: CheckContext, state: Eigenstate | None = None) -> bool:
        return state is not None and state.is_ground

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        assert state is not None
        return [ground_state.ground_state_condition(state, _cloud(ctx, state),
                                                    ctx.config.tolerances.exact)]


class MapRoundTripCheck(Check):
    name = "map_roundtrip"
    eq_ref = residuals.ROUNDTRIP

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        assert state is not None
        return [residuals.map_roundtrip(state, _cloud(ctx, state), ROUNDTRIP_TOL)]


class EvRelationCheck(Check):
    name = "ev_relation"
    eq_ref = ev_relation.EV_RELATION
    scope = Scope.GLOBAL

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        results = []
        for system, scales in ctx.scales.items():
            cloud = _cloud(ctx, _ground(scales))
            results.append(ev_relation.check_ev_relation(scales.lam, scales.b, scales, cloud,
                                                         ctx.config.tolerances.exact))
            results.append(ev_relation.check_reference(ctx.config.constants, system,
                                                   ctx.config.tolerances.exact))
        return results


class DecompositionCheck(Check):
    name = "lambda_decomposition"
    eq_ref = ev_relation.DECOMPOSITION
    scope = Scope.GLOBAL

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        scales = next(iter(ctx.scales.values()))
        return [ev_relation.check_decomposition(scales)]


class HolomorphyCheck(Check):
    name = "holomorphy"
    eq_ref = "∂²τ/∂t² + (α₀²E²/ħ²)∂²τ/∂r² = 0"
    scope = Scope.GLOBAL
    systems = (System.HYDROGEN,)

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        ground = _ground(ctx.scales[System.HYDROGEN])
        p = MapParams.for_state(ground)
        cloud = _cloud(ctx, ground)
        analytic = ResidualAccumulator("holomorphy_analytic", self.eq_ref, 0.0, len(cloud),
                                       basis=Basis.ABSOLUTE)
        numeric = ResidualAccumulator("holomorphy_fd", self.eq_ref, HOLOMORPHY_FD_TOL, len(cloud),
                                      basis=Basis.ABSOLUTE)
        for r, t in zip(cloud.radii, cloud.times):
            residual = cr_residual(p, float(r), float(t))
            analytic.add(max(residual.analytic, residual.pair_analytic), 1.0)
            numeric.add(max(residual.finite_difference, residual.pair_finite_difference), 1.0)
        return [analytic.stats(), numeric.stats()]


class CoordinateIndependenceCheck(Check):
    name = "coordinate_independence"
    eq_ref = "∂z_i/∂s = ∂s/∂z_i = ∂z_i*/∂s* = ∂s*/∂z_i* = 0"
    scope = Scope.GLOBAL

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        results = []
        for scales in ctx.scales.values():
            ground = _ground(scales)
            p = MapParams.for_state(ground)
            cloud = _cloud(ctx, ground)
            acc = ResidualAccumulator(f"{self.name}[lambda={scales.lam}]", self.eq_ref,
                                      INDEPENDENCE_TOL, len(cloud), basis=Basis.ABSOLUTE)
            for x, _ in cloud:
                acc.add(float(coordinate_independence(x, p, r_min=ground.r_min).max()), 1.0)
            results.append(acc.stats())
        return results


class LadderCheck(Check):
    name = "ladder"
    eq_ref = ground_state.LOWERING
    scope = Scope.GLOBAL
    systems = (System.OSCILLATOR,)

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        ground = _ground(ctx.scales[System.OSCILLATOR])
        cloud = _cloud(ctx, ground)
        tol = ctx.config.tolerances
        return [
            ground_state.ladder_lowering(ground, cloud, tol.exact),
            ground_state.ladder_raising(ground, cloud),
            ground_state.ladder_commutator_check(ground, cloud, tol.analytic),
        ]


class ConventionCheck(Check):
    """Numeric radial norms against the closed-form constant for n up to convention_n_max.

    The closed form pairs with the older Laguerre convention, so a ratio of
    (n+l)! is accepted alongside 1. Every ratio is recorded on the context.
    """

    name = "normalization_convention"
    eq_ref = "C_nl = (2/n²)α₀^(-3/2) √((n-l-1)!/((n+l)!)³)"
    scope = Scope.GLOBAL
    systems = (System.HYDROGEN,)

    def execute(self, ctx: CheckContext, state: Eigenstate | None = None) -> list[ResidualStats]:
        scales = ctx.scales[System.HYDROGEN]
        worst = 0.0
        ratios: list[ConventionRatio] = []
        for n in range(1, ctx.config.convention_n_max + 1):
            for l in range(n):
                numeric = hydrogen_state(scales, QuantumNumbers(n, l, 0)).radial_norm
                closed = cnl_closed_form(scales, n, l)
                factorial = math.factorial(n + l)
                ratio = ConventionRatio(n=n, l=l, numeric=numeric, closed_form=closed,
                                        ratio=numeric / closed, factorial=factorial)
                if ratio.pairing == "mismatch":
                    logger.warning("radial norm (%d,%d) matches neither convention: ratio %.12g",
                                   n, l, ratio.ratio)
                elif ratio.pairing == "factorial":
                    logger.info("radial norm (%d,%d) pairs with the closed form via (n+l)! = %d",
                                n, l, factorial)
                worst = max(worst, min(abs(ratio.ratio - 1.0), abs(ratio.ratio / factorial - 1.0)))
                ratios.append(ratio)
        ctx.convention_ratios.extend(ratios)
        return [ResidualStats(
            name=self.name, eq_ref=self.eq_ref, n_points=len(ratios),
            max_abs=worst, max_rel=worst, mean_abs=worst, tol=CONVENTION_TOL,
        )]


def default_registry() -> CheckRegistry:
    """Registry holding every built-in check in report order."""
    registry = CheckRegistry()
    for check in (
        NormalizationCheck(),
        JetCheck(),
        SchrodingerCheck(),
        TransformedCheck(),
        MixedDerivativeCheck(),
        OperatorIdentityCheck(),
        WavefunctionConsistencyCheck(),
        GroundStateCheck(),
        MapRoundTripCheck(),
        EvRelationCheck(),
        DecompositionCheck(),
        HolomorphyCheck(),
        CoordinateIndependenceCheck(),
        LadderCheck(),
        ConventionCheck(),
    ):
        registry.register(check)
    return registry
