"""Exception types shared across the package."""

from __future__ import annotations


class SineflowError(Exception):
    """Base class for all package errors."""


class InvalidInput(SineflowError, ValueError):
    """Arguments violate a documented precondition."""


class EmbeddednessViolation(SineflowError):
    """A polyline that must be simple intersects itself."""


class OnBoundary(SineflowError):
    """A query point lies on (or within tolerance of) a curve.

    Raised instead of returning a bool from inside/outside tests, so callers
    cannot silently misclassify boundary points.
    """


class DomainError(SineflowError, ValueError):
    """Evaluation requested outside a function's open domain."""


class ResolutionError(SineflowError):
    """A vertex budget is too small to meet the accuracy target."""


class ConstructionError(SineflowError):
    """A curve construction failed geometrically (e.g. offset collapsed).

    Callers typically retry with a smaller offset distance.
    """


class OutOfHypothesis(SineflowError, ValueError):
    """Certificate parameters outside the certified range."""


class EmptyCurve(SineflowError):
    """A sampling window contains no curve."""


class WindowTooWide(SineflowError):
    """Slope bound violated on the requested window.

    Carries ``sup_slope`` so the caller can shrink the window.
    """

    def __init__(self, sup_slope: float):
        self.sup_slope = sup_slope
        super().__init__(f"slope bound violated: sup |u'| = {sup_slope:.6g}")


class HypothesisViolation(SineflowError):
    """A measured crossing count exceeds the claimed bound.

    Carries a witness line (base point, direction, count).
    """

    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class StepRejected(SineflowError):
    """A flow step could not be completed even after timestep halving."""


class Extinct(SineflowError):
    """A curve shrank below the resolvable scale before the target time.

    Carries the time of the event and the last valid state.
    """

    def __init__(self, time: float, state):
        self.time = time
        self.state = state
        super().__init__(f"curve extinct near t = {time:.6g}")


class InvalidState(SineflowError):
    """A compound state (e.g. an annulus) violates its invariant."""
