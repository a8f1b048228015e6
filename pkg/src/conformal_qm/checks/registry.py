"""Check registry: the ordered set of checks a suite runs."""

from __future__ import annotations

from conformal_qm.checks.base import Check, Scope


class CheckRegistry:
    """Central registry for the checks available to the engine."""

    def __init__(self) -> None:
        self._checks: dict[str, Check] = {}

    def register(self, check: Check) -> None:
        self._checks[check.name] = check

    def get(self, name: str) -> Check:
        if name not in self._checks:
            raise KeyError(f"Check '{name}' not registered")
        return self._checks[name]

    def available(self) -> list[str]:
        return list(self._checks.keys())

    def by_scope(self, scope: Scope) -> list[Check]:
        return [c for c in self._checks.values() if c.scope is scope]

    def __len__(self) -> int:
        return len(self._checks)
