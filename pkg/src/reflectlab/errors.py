"""Exception hierarchy shared by every module."""


class ReflectLabError(Exception):
    """Base class for domain and validation errors (CLI exit code 1)."""


class ParseError(ReflectLabError):
    pass


class DomainError(ReflectLabError):
    pass


class BlanketAssumptionViolation(DomainError):
    """Raised when a law does not put mass on both sides of zero."""


class PreconditionViolation(ReflectLabError):
    pass


class QuadratureFailure(ReflectLabError):
    pass
