"""Exception hierarchy shared across the library.

Errors fall into three families.  ``SchemaError`` covers malformed input
files, ``CapExceededError`` covers refused enumerations, and
``AdmissibilityError`` covers every situation where a mathematical
hypothesis needed by a computation does not hold for the given input.
The command line tool maps these families onto distinct exit codes.
"""


class MagnodalError(Exception):
    """Base class for all library errors."""


class SchemaError(MagnodalError):
    """Input file or object does not match the documented JSON layout."""


class GraphMismatchError(MagnodalError):
    """Two objects that must live on the same graph do not."""


class CapExceededError(MagnodalError):
    """An enumeration would exceed the configured size cap."""


class EigenSolverError(MagnodalError):
    """The dense eigensolver failed to converge."""


class InternalCrossCheckError(MagnodalError):
    """Two independent computation routes disagreed.

    Raised when a redundant check that must hold by theory fails
    numerically.  This always indicates either a bug or an input far
    outside the working tolerances, never a routine precondition
    failure.
    """


class AdmissibilityError(MagnodalError):
    """A hypothesis required by the computation fails for this input."""


class NotProperlySupportedError(AdmissibilityError):
    """An off-diagonal entry vanishes on an edge where it must not."""


class NonSimpleEigenvalueError(AdmissibilityError):
    """The selected eigenvalue is degenerate."""

    def __init__(self, message, k=None, multiplicity=None):
        super().__init__(message)
        self.k = k
        self.multiplicity = multiplicity


class VanishingEigenvectorError(AdmissibilityError):
    """The eigenvector vanishes at one or more vertices."""

    def __init__(self, message, vertices=()):
        super().__init__(message)
        self.vertices = tuple(vertices)


class EdgeProductNotRealError(AdmissibilityError):
    """An edge product has an imaginary part beyond tolerance."""


class DegenerateEdgeProductError(AdmissibilityError):
    """An edge product is too close to zero to carry a sign."""

    def __init__(self, message, edges=()):
        super().__init__(message)
        self.edges = tuple(edges)


class NotCriticalError(AdmissibilityError):
    """The point is not a critical point of the selected eigenvalue."""


class InadmissibleSigningError(AdmissibilityError):
    """A signing in a sweep fails one of the per-signing hypotheses."""

    def __init__(self, message, signs=None, k=None, reason=None):
        super().__init__(message)
        self.signs = signs
        self.k = k
        self.reason = reason


class NonGenericLengthsError(AdmissibilityError):
    """Some signed sum of the length set vanishes within tolerance."""


class EmptyConfigurationError(AdmissibilityError):
    """The closure condition has no solution for these lengths."""


class LinkageHypothesisError(AdmissibilityError):
    """A hypothesis of the exceptional-point analysis fails.

    ``hypothesis`` is 1 (eigenvalue of the reduced block not simple),
    2 (length set not generic) or 3 (spectral shift coefficient
    degenerate).
    """

    def __init__(self, message, hypothesis):
        super().__init__(message)
        self.hypothesis = hypothesis


class StratumAmbiguousError(AdmissibilityError):
    """Eigenvalue cluster does not start at the requested index."""


class DegenerateDistributionError(AdmissibilityError):
    """A distribution has no spread to normalize by."""
