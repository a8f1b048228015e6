"""Composite Gauss-Legendre radial quadrature and a product angular grid."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from conformal_qm.errors import QuadratureError

logger = logging.getLogger(__name__)

RadialIntegrand = Callable[[NDArray[np.float64]], NDArray[np.float64]]


class QuadratureConfig(BaseModel):
    """Panel refinement settings; ``r_max`` is chosen per state when omitted."""

    model_config = ConfigDict(frozen=True)

    points_per_panel: int = Field(default=64, ge=2)
    initial_panels: int = Field(default=2, ge=1)
    max_panels: int = Field(default=4096, ge=1)
    tol: float = Field(default=1e-11, gt=0)
    r_min: float | None = None
    r_max: float | None = None


@lru_cache(maxsize=8)
def _reference_rule(order: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    return np.polynomial.legendre.leggauss(order)


def _panel_sums(
    f: RadialIntegrand, a: float, b: float, panels: int, order: int,
) -> tuple[float, float]:
    """(∫f, ∫|f|) over ``panels`` equal panels of ``order`` nodes each."""
    nodes, weights = _reference_rule(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    r = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    values = f(r)
    return float(np.dot(w, values)), float(np.dot(w, np.abs(values)))


def composite_gauss_legendre(
    f: RadialIntegrand, a: float, b: float, panels: int, order: int,
) -> float:
    """∫_a^b f(r) dr over ``panels`` equal panels of ``order`` nodes each."""
    return _panel_sums(f, a, b, panels, order)[0]


def integrate_radial(f: RadialIntegrand, a: float, b: float, config: QuadratureConfig) -> float:
    """Double the panel count until successive estimates agree to ``config.tol``.

    Agreement is measured against ∫|f| so integrals that cancel to zero, such as
    overlaps of orthogonal states, still converge.
    """
    panels = config.initial_panels
    previous, _ = _panel_sums(f, a, b, panels, config.points_per_panel)
    while panels < config.max_panels:
        panels *= 2
        current, magnitude = _panel_sums(f, a, b, panels, config.points_per_panel)
        scale = max(magnitude, np.finfo(float).tiny)
        logger.debug("radial quadrature: %d panels, estimate %.17g", panels, current)
        if abs(current - previous) <= config.tol * scale:
            return current
        previous = current
    raise QuadratureError(
        f"radial quadrature on [{a}, {b}] did not converge to {config.tol} "
        f"within {config.max_panels} panels"
    )


@lru_cache(maxsize=8)
def angular_grid(degree: int) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Gauss-Legendre in cos θ times the trapezoid rule in φ.

    Exact for products of spherical harmonics up to combined degree ``degree``.
    Returns flattened (θ, φ, weight) arrays whose weights sum to 4π.
    """
    n_theta = degree // 2 + 2
    n_phi = degree + 2
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    theta = np.arccos(x)
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    weights = np.outer(wx, np.full(n_phi, 2.0 * math.pi / n_phi))
    return th.ravel(), ph.ravel(), weights.ravel()
