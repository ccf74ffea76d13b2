"""Exception types shared across the toolkit.

Validation failures subclass ``ValueError`` and numerical failures subclass
``ArithmeticError`` so the CLI can map them onto distinct exit codes without
inspecting messages.
"""

from __future__ import annotations


class DimensionError(ValueError):
    """Matrix or vector shapes do not conform."""


class PlacementError(ValueError):
    """Spectral data sits in the wrong half plane for its side."""


class MergeError(ValueError):
    """Two bound-state specs share a pole; the caller must merge them first."""


class UnsupportedMultiplicityError(ValueError):
    """Norming-constant formulas are only available up to multiplicity three."""


class AliasingError(ValueError):
    """A sampled reflection profile does not decay enough for its grid."""


class ConfigError(ValueError):
    """Run configuration failed schema validation."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class BranchPointError(ValueError):
    """Jost-solution change of variables requested at lambda = 0, where the
    1/sqrt(lambda) factors are singular."""


class SingularMatrixError(ArithmeticError):
    """Matrix numerically singular; carries the condition estimate."""

    def __init__(self, message: str, condition: float = float("inf")):
        super().__init__(message)
        self.condition = condition


class SpectralOverlapError(ArithmeticError):
    """The Sylvester operator is singular (spectra of A and Abar overlap)."""


class SpectralCollisionError(ArithmeticError):
    """Evaluation requested at a pole of the quantity (lambda hits a triplet eigenvalue)."""


class IntegrationError(ArithmeticError):
    """Quadrature or ODE integration failed; carries the x location if known."""

    def __init__(self, message: str, location: float | None = None):
        super().__init__(message)
        self.location = location


class ConditioningError(ArithmeticError):
    """Discretized integral operator too ill-conditioned to trust."""


class TruncationError(ArithmeticError):
    """Kernel tail still above threshold at the truncation boundary."""


class NormalizationError(ArithmeticError):
    """A required normalization value (transmission at the origin) vanished."""


class WindingError(ArithmeticError):
    """Argument-principle phase tracking failed to stabilize on a contour."""
