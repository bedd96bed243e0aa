"""Exception hierarchy shared across the package.

Everything raised on purpose derives from PiforgeError, so callers (and the
CLI) can distinguish domain failures from genuine bugs.
"""


class PiforgeError(Exception):
    """Base class for all errors raised by piforge."""


class NoSolutionError(PiforgeError):
    """A linear system has no exact solution (right side outside the column space)."""


class SingularMatrixError(PiforgeError):
    """Inversion was requested for a matrix of deficient rank."""


class SystemMismatchError(PiforgeError):
    """Values from different dimension systems were combined."""


class DimensionMismatchError(PiforgeError):
    """An operation required equal dimensions and got different ones."""


class ArityMismatchError(PiforgeError):
    """A combination function was applied to the wrong number of inputs."""


class EmptyListError(PiforgeError):
    """A nonempty list of units was required."""


class InconsistentUnitsError(PiforgeError):
    """A consistent unit list was required and the given one clashes."""


class InconsistentReferenceError(PiforgeError):
    """A reference list used for nondimensionalization is not consistent."""


class DependentBaseError(PiforgeError):
    """A base with linearly independent dimensions was required."""


class NotABasisError(PiforgeError):
    """A candidate list of pi groups is not a basis of the kernel space."""


class ParseError(PiforgeError):
    """Malformed dimension, quantity, or relation text."""


class UnknownFundamentalError(ParseError):
    """A dimension expression names a fundamental outside the active system."""


class UnknownUnitError(ParseError):
    """A quantity literal names a unit missing from the registry."""


class DimensionError(PiforgeError):
    """A relation expression violates the dimensional typing discipline.

    Carries the offending AST node and the two dimensions that failed to
    agree (either may be None when the complaint is not a plain mismatch,
    e.g. a transcendental applied to a dimensional operand).
    """

    def __init__(self, message, node=None, left=None, right=None):
        super().__init__(message)
        self.node = node
        self.left = left
        self.right = right


class EvaluationError(PiforgeError):
    """A well-typed expression hit a runtime domain fault (e.g. a non-positive
    intermediate value flowing into a multiplicative context)."""


class SpecError(PiforgeError):
    """A problem-spec file is unreadable, malformed, or ill-typed."""
