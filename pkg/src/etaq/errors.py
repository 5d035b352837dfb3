"""Exception types shared across the package."""


class EtaqError(Exception):
    """Base class for all package-specific errors."""


class NonUnitConstantTerm(EtaqError):
    """Series inversion requires a unit constant term."""


class ResourceLimit(EtaqError):
    """A configured enumeration or search budget was exceeded.

    ``partial`` carries whatever was computed before the budget ran out,
    so callers can flag incomplete results instead of discarding them.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class FactorizationBudgetExceeded(ResourceLimit):
    """Trial division hit its budget before the cofactor was resolved."""


class ConditionsFail(EtaqError):
    """Eta-quotient modularity congruences do not hold."""

    def __init__(self, failures):
        super().__init__("; ".join(failures))
        self.failures = list(failures)


class PreconditionFail(EtaqError):
    """An operation was called outside its documented domain."""


class NonIntegralWeight(EtaqError):
    """Hecke operators here are defined for integral weight k >= 2 only."""


class TruncationTooSmall(EtaqError):
    """The series is too short for the requested operator index."""


class DegreeOverflow(EtaqError):
    """Held-out verification of an interpolated polynomial failed."""


class ZeroPolynomial(EtaqError):
    """Root extraction was asked for the zero polynomial."""


class UsageError(EtaqError):
    """Malformed command-line invocation."""
