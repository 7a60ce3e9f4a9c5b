"""Exception hierarchy shared by every module."""


class TripleEisError(Exception):
    """Base class for library errors."""


class DomainError(TripleEisError, ValueError):
    """An argument lies outside the domain of the operation."""


class PrecisionError(TripleEisError, ArithmeticError):
    """Not enough p-adic precision to answer the question asked."""


class ResourceError(TripleEisError, RuntimeError):
    """An enumeration would exceed its configured budget."""


class UnsupportedError(TripleEisError, NotImplementedError):
    """A feature outside the implemented scope was requested."""


class VerificationError(TripleEisError, AssertionError):
    """An internal consistency check failed."""
