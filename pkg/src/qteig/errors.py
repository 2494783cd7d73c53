"""Exception types shared across the package."""


class QTEigError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSymbolError(QTEigError):
    """A symbol coefficient list violates its invariants (zero trailing
    coefficient, too few coefficients, ...)."""


class InconsistentConstantError(QTEigError):
    """The two halves of a symbol disagree on the constant coefficient."""


class InvalidInputError(QTEigError):
    """An argument is structurally invalid (zero vector, bad shape, ...)."""


class DomainError(QTEigError):
    """An argument lies outside the mathematical domain of the operation."""


class OnCurveError(QTEigError):
    """The shift sits (numerically) on the symbol curve, where the winding
    number and the inside/outside root split are undefined."""


class SingularMatrixError(QTEigError):
    """A linear system is numerically singular."""


class ConvergenceError(QTEigError):
    """An iterative kernel exhausted its iteration budget."""


class SectionTooSmallError(QTEigError):
    """A finite section is too small to contain the band and correction."""


class PrefixTooShortError(QTEigError):
    """A vector prefix is too short for the requested product entries."""


class FactorizationUnstableError(QTEigError):
    """A polynomial factorization failed its reconstruction check."""


class ClusteredRootsError(QTEigError):
    """Roots are too close together (or multiple) for a root-power basis."""


class DerivativeVanishesError(QTEigError):
    """The Newton denominator vanished; the iteration cannot proceed."""
