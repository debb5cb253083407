"""Exception types shared across the package."""


class EvscError(Exception):
    """Base class for errors raised by this package."""

    exit_code = 1


class DomainError(EvscError, ValueError):
    """An argument lies outside the region where a formula is defined or proven."""

    exit_code = 3


class BracketError(DomainError):
    """The supplied interval does not bracket a sign change."""


class NumericError(EvscError, ArithmeticError):
    """A numerical procedure (series, quadrature) failed to converge."""

    exit_code = 4
