"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class TangentFormError(Exception):
    """Base class for every library error."""


class NumericError(TangentFormError):
    """Failure of a numerical hypothesis (maps to CLI exit code 3)."""

    def __init__(self, message: str, *, t: float | None = None):
        super().__init__(message)
        self.t = t


class DomainError(NumericError):
    """A jet or real operation left its domain (ln of a non-positive value, ...)."""

    def __init__(self, fn: str, value: float, pos: int | None = None):
        where = "" if pos is None else f" at offset {pos}"
        super().__init__(f"{fn} undefined at {value!r}{where}")
        self.fn = fn
        self.value = value
        self.pos = pos


class RegularityError(NumericError):
    """The antisymmetrised vertical Jacobian h is not invertible."""

    def __init__(self, cond: float, **kw):
        super().__init__(f"h is singular (condition number {cond:.3g})", **kw)
        self.cond = cond


class NonDegeneracyError(NumericError):
    """The vertical Jacobian of the top component is not invertible."""

    def __init__(self, cond: float, **kw):
        super().__init__(f"d(omegabar)/dy is singular (condition number {cond:.3g})", **kw)
        self.cond = cond


class InversionError(NumericError):
    """Newton inversion of the Legendre map did not converge."""

    def __init__(self, residual: float, iterations: int, **kw):
        super().__init__(
            f"Legendre inversion stalled after {iterations} iterations (residual {residual:.3g})", **kw
        )
        self.residual = residual
        self.iterations = iterations


class QuadratureError(NumericError):
    """Adaptive quadrature failed to reach its tolerance."""


class PreconditionError(TangentFormError):
    """An operation was called outside its stated hypotheses."""


class SamplingError(TangentFormError):
    """A sample set does not carry enough information for a fit."""


class ExprError(TangentFormError):
    """Base class for expression-language errors."""

    def __init__(self, message: str, pos: int | None = None):
        super().__init__(message if pos is None else f"{message} (offset {pos})")
        self.pos = pos


class ParseError(ExprError):
    """Malformed expression text."""


class UnknownIdentifierError(ExprError):
    """An identifier that is neither a variable, a function nor a constant."""


class VariableRangeError(ExprError):
    """A variable index outside 1..m."""
