"""Exception types shared across the package."""


class ColombeauLabError(Exception):
    """Base class for all package errors."""


class OrderBudgetError(ColombeauLabError):
    """A derivative of higher order than the analytic budget was requested."""


class CatalogError(ColombeauLabError):
    """Unknown catalog entry or invalid catalog parameters."""


class QuadratureError(ColombeauLabError):
    """Adaptive integration did not reach the requested tolerance.

    Carries the best estimate and the error bound at the point of failure.
    """

    def __init__(self, message, best=None, error_bound=None):
        super().__init__(message)
        self.best = best
        self.error_bound = error_bound


class MomentConstructionError(ColombeauLabError):
    """Moment system singular or too ill-conditioned to trust."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class AdmissibilityError(ColombeauLabError):
    """(mollifier, point) pair leaves the domain, or a sweep would."""


class EmptySetError(ColombeauLabError):
    """A constructed compact set came out empty."""


class InsufficientSamplesError(ColombeauLabError):
    """Too few usable samples above the noise floor for a rate fit."""


class DslSyntaxError(ColombeauLabError):
    """Syntax error in the expression DSL, with 1-based character position."""

    def __init__(self, message, position, expected=()):
        super().__init__(f"{message} at position {position}"
                         + (f" (expected {', '.join(sorted(expected))})" if expected else ""))
        self.position = position
        self.expected = frozenset(expected)
