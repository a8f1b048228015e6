"""Exception hierarchy for conformal-qm."""

from __future__ import annotations


class ConformalQMError(Exception):
    """Base class for every error raised by conformal-qm."""


class InvalidInputError(ConformalQMError, ValueError):
    """A constant, parameter or option is outside its allowed range."""


class InvalidQuantumNumbersError(InvalidInputError):
    """Quantum numbers violate the system's selection rules."""


class DomainError(InvalidInputError):
    """A special function was called outside its domain."""


class PoleProximityError(ConformalQMError):
    """An angular derivative was requested too close to the polar axis."""


class SingularityError(ConformalQMError):
    """A point lies within the singular neighbourhood of the origin."""


class QuadratureError(ConformalQMError):
    """Successive quadrature refinements failed to agree."""


class InconsistentEventError(ConformalQMError):
    """A complex event's imaginary time does not match the map parameters."""


class UnsupportedSystemError(ConformalQMError):
    """The operation is not defined for this system or map index."""


class InvalidStateError(ConformalQMError):
    """The eigenstate is not acceptable for this check."""


class StepError(InvalidInputError):
    """Finite-difference step is too small for the point's scale."""


class CloudError(ConformalQMError):
    """Too many sample points were rejected by evaluation guards."""
