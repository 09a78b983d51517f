"""Exception hierarchy shared by all resolab modules."""

from __future__ import annotations


class ResolabError(Exception):
    """Base class for all errors raised by resolab."""


class DomainError(ResolabError):
    """An argument lies outside the domain an operation is defined on."""


class PotentialFormatError(ResolabError):
    """A potential description (JSON or constructor arguments) is invalid."""


class NonconvergenceError(ResolabError):
    """The ODE integrator or a quadrature failed to reach its tolerance.

    Carries the location of the failure when known.
    """

    def __init__(self, message, *, x=None, k=None):
        super().__init__(message)
        self.x = x
        self.k = k


class ZeroOnContourError(ResolabError):
    """A zero of the analytic function sits (numerically) on the contour."""


class CountMismatchError(ResolabError):
    """Harvested zeros do not reproduce the argument-principle count."""


class SearchBudgetError(ResolabError):
    """Recursive subdivision exceeded its depth budget."""


class PoleError(ResolabError):
    """A logarithmic derivative was requested at a zero of the denominator."""


class SymmetryViolationError(ResolabError):
    """A quantity that must be real by conjugation symmetry is not."""


class ConsistencyError(ResolabError):
    """A computed quantity violates a structural fact it must satisfy."""


class Inapplicable(ResolabError):
    """A check's hypotheses are not met; callers should skip, not fail."""
