"""Physical constants, unit systems and derived scales.

Every dimensional symbol used elsewhere in the package is read from a
``DerivedScales`` instance, so the rest of the code never assumes a unit system.
The default is Hartree atomic units with the reduced mass as the mass unit.
"""

from __future__ import annotations

import logging
import math
from enum import StrEnum
from pathlib import Path
from typing import Any, Mapping

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy import constants as sc

from conformal_qm.core.specfun import FloatOrArray
from conformal_qm.errors import InvalidInputError, InvalidQuantumNumbersError

logger = logging.getLogger(__name__)

UNITS_ENV_VAR = "CONFORMAL_QM_UNITS"

POSITIVE_FIELDS = ("hbar", "mu", "charge_e", "epsilon0", "omega", "m_e", "m_p")


class System(StrEnum):
    """Bound systems covered by the conformal map family."""

    HYDROGEN = "hydrogen"
    OSCILLATOR = "oscillator"


class PhysicalConstants(BaseModel):
    """Fundamental constants of one unit system.

    ``mu`` may be omitted when both ``m_e`` and ``m_p`` are given; it is then the
    reduced mass. ``omega`` is only read by the oscillator.
    """

    model_config = ConfigDict(frozen=True)

    name: str = "custom"
    hbar: float
    mu: float
    charge_e: float
    epsilon0: float
    omega: float = 1.0
    m_e: float | None = None
    m_p: float | None = None

    @model_validator(mode="before")
    @classmethod
    def _fill_reduced_mass(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("mu") is None:
            m_e, m_p = data.get("m_e"), data.get("m_p")
            if m_e is not None and m_p is not None:
                m_e, m_p = float(m_e), float(m_p)
                data = {**data, "mu": m_e * m_p / (m_e + m_p)}
        return data

    @model_validator(mode="after")
    def _check(self) -> PhysicalConstants:
        for field in POSITIVE_FIELDS:
            value = getattr(self, field)
            if value is not None and not (math.isfinite(value) and value > 0):
                raise ValueError(f"{field} must be strictly positive and finite, got {value}")
        if self.m_e is not None and self.m_p is not None:
            reduced = self.m_e * self.m_p / (self.m_e + self.m_p)
            if abs(self.mu - reduced) > 1e-12 * reduced:
                raise ValueError(
                    f"mu={self.mu} is not the reduced mass of m_e and m_p ({reduced})"
                )
        return self

    @property
    def coulomb_strength(self) -> float:
        """e²/4πε₀."""
        return self.charge_e**2 / (4.0 * math.pi * self.epsilon0)

    def scaled(self, c: float) -> PhysicalConstants:
        """Return constants with ħ → cħ and μ → μ/c."""
        return self.model_copy(update={"hbar": self.hbar * c, "mu": self.mu / c,
                                       "m_e": None, "m_p": None})


ATOMIC = PhysicalConstants(
    name="atomic", hbar=1.0, mu=1.0, charge_e=1.0, epsilon0=1.0 / (4.0 * math.pi), omega=1.0,
)

SI = PhysicalConstants(
    name="si",
    hbar=sc.hbar,
    charge_e=sc.e,
    epsilon0=sc.epsilon_0,
    m_e=sc.m_e,
    m_p=sc.m_p,
    # one atomic unit of angular frequency, E_h / ħ
    omega=sc.physical_constants["Hartree energy"][0] / sc.hbar,
)

PRESETS: dict[str, PhysicalConstants] = {"atomic": ATOMIC, "si": SI}


class DerivedScales(BaseModel):
    """Length and energy scales of one system in one unit set."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    system: System
    hbar: float
    mu: float
    alpha0: float | None = None
    b: float
    lam: int = Field(alias="lambda")
    E_ground: float
    omega: float | None = None
    coulomb_strength: float | None = None

    @property
    def length_scale(self) -> float:
        return self.b

    def energy_level(self, n: int | None = None, *, n_r: int = 0, l: int = 0) -> float:
        """Eₙ = E₀/n² for hydrogen, ħω(2n_r + l + 3/2) for the oscillator."""
        if self.system is System.HYDROGEN:
            if n is None or n < 1:
                raise InvalidQuantumNumbersError(f"hydrogen level needs n >= 1, got {n}")
            return self.E_ground / n**2
        if n_r < 0 or l < 0:
            raise InvalidQuantumNumbersError(f"oscillator level needs n_r, l >= 0, got {n_r}, {l}")
        assert self.omega is not None
        return self.hbar * self.omega * (2 * n_r + l + 1.5)

    def potential(self, r: FloatOrArray) -> FloatOrArray:
        """Central potential V(r), elementwise for arrays."""
        if self.system is System.HYDROGEN:
            assert self.coulomb_strength is not None
            return -self.coulomb_strength / r
        assert self.omega is not None
        return 0.5 * self.mu * self.omega**2 * r**2


def _require_positive(constants: PhysicalConstants, fields: tuple[str, ...]) -> None:
    for field in fields:
        value = getattr(constants, field)
        if value is None or not (math.isfinite(value) and value > 0):
            raise InvalidInputError(f"{field} must be strictly positive, got {value}")


def derive_scales(constants: PhysicalConstants, system: System | str) -> DerivedScales:
    """Derive α₀, b, λ and E₀ for the requested system."""
    system = System(system)
    if system is System.HYDROGEN:
        _require_positive(constants, ("hbar", "mu", "charge_e", "epsilon0"))
        alpha0 = (4.0 * math.pi * constants.epsilon0 * constants.hbar**2
                  / (constants.mu * constants.charge_e**2))
        return DerivedScales(
            system=system,
            hbar=constants.hbar,
            mu=constants.mu,
            alpha0=alpha0,
            b=alpha0,
            lam=1,
            E_ground=-constants.hbar**2 / (2.0 * constants.mu * alpha0**2),
            coulomb_strength=constants.coulomb_strength,
        )

    _require_positive(constants, ("hbar", "mu", "omega"))
    return DerivedScales(
        system=system,
        hbar=constants.hbar,
        mu=constants.mu,
        b=math.sqrt(2.0 * constants.hbar / (constants.mu * constants.omega)),
        lam=2,
        E_ground=1.5 * constants.hbar * constants.omega,
        omega=constants.omega,
    )


def constants_from_mapping(data: Mapping[str, Any], name: str = "custom") -> PhysicalConstants:
    """Validate a key=value mapping into PhysicalConstants."""
    unknown = set(data) - set(PhysicalConstants.model_fields)
    if unknown:
        raise InvalidInputError(f"unknown constant(s): {', '.join(sorted(unknown))}")
    try:
        return PhysicalConstants(**{"name": name, **data})
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(p) for p in first["loc"]) or "constants"
        raise InvalidInputError(f"{field}: {first['msg']}") from exc


def read_key_value_file(path: Path) -> dict[str, str]:
    """Parse ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        entries[key] = value
    return entries


def resolve_units(spec: str) -> PhysicalConstants:
    """Resolve ``atomic``, ``si`` or ``file:<path>`` to a constant set."""
    if spec in PRESETS:
        return PRESETS[spec]
    if spec.startswith("file:"):
        path = Path(spec[len("file:"):])
        logger.debug("loading constants from %s", path)
        return constants_from_mapping(read_key_value_file(path), name=spec)
    raise InvalidInputError(f"unknown unit system {spec!r} (use atomic, si or file:<path>)")
