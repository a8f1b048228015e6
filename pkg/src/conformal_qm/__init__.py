"""conformal-qm: numerical verification of isometric conformal maps for exactly solvable quantum systems."""

__version__ = "1.0.0"

from conformal_qm.core.engine import VerificationEngine
from conformal_qm.core.result import ResidualStats, SuiteConfig, VerificationReport

__all__ = ["VerificationEngine", "ResidualStats", "SuiteConfig", "VerificationReport"]
