"""Exception types shared by every fraclog module."""

from __future__ import annotations


class FraclogError(Exception):
    """Base class for all fraclog failures."""


class DomainError(FraclogError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class NotCertifiedError(FraclogError, ArithmeticError):
    """A requested tolerance could not be certified.

    ``bound`` carries the best error bound that was achieved, if any.
    """

    def __init__(self, message: str, bound: float | None = None) -> None:
        super().__init__(message)
        self.bound = bound


class SolverError(FraclogError, ArithmeticError):
    """Non-finite values appeared while stepping a fractional ODE."""

    def __init__(self, message: str, step: int) -> None:
        super().__init__(message)
        self.step = step
