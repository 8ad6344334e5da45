"""Exception types shared across the package."""


class CompopError(Exception):
    """Base class for package errors."""


class DomainError(CompopError, ValueError):
    """An argument lies outside the domain of the operation."""


class MethodError(CompopError, ValueError):
    """A method was requested for parameters it does not support."""


class CoverageError(CompopError, ValueError):
    """A character sample does not cover every prime in use."""


class ResourceGuardError(CompopError, MemoryError):
    """A dense object would exceed the configured size cap."""


class NumericalFailure(CompopError, ArithmeticError):
    """An iteration failed to converge or a system is numerically singular."""


class ClassGError(CompopError, ValueError):
    """A symbol violates the structural invariants of the admissible class."""
