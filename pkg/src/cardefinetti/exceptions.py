"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class CarError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class DomainError(CarError, ValueError):
    """Argument outside the mathematical domain of an operation."""

    exit_code = 1


class DimensionError(DomainError):
    """Operator or state dimension does not match the mode count."""


class NotSymmetricError(CarError):
    """A permutation-invariant state was required."""

    exit_code = 2


class InfeasibleMomentsError(CarError):
    """Moment sequence is not a truncated Hausdorff sequence within tolerance."""

    exit_code = 3


class CapacityError(CarError):
    """Problem size exceeds what the dense implementation supports."""

    exit_code = 4


class DegenerateInputError(DomainError):
    """Input lies on a boundary where the requested quantity is undefined."""


class IdentityCheckError(CarError, AssertionError):
    """A checked algebraic identity failed numerically."""
