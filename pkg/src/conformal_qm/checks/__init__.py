"""Residual checks composing the verification suite."""

from conformal_qm.checks.base import Check, CheckContext, Scope
from conformal_qm.checks.registry import CheckRegistry
from conformal_qm.checks.suite import default_registry

__all__ = ["Check", "CheckContext", "CheckRegistry", "Scope", "default_registry"]
