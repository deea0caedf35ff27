"""Curve shortening flow lab for polygonal curves and nested approximations."""

from .errors import (
    ConstructionError,
    DomainError,
    EmbeddednessViolation,
    EmptyCurve,
    Extinct,
    HypothesisViolation,
    InvalidInput,
    InvalidState,
    OnBoundary,
    OutOfHypothesis,
    ResolutionError,
    SineflowError,
    StepRejected,
    WindowTooWide,
)
from .geom_core import (
    TAU_GEO,
    Ball,
    LineSpec,
    Point2,
    Polyline,
    enclosed_area,
    hausdorff_distance,
    point_in_region,
    polyline_length,
    resample_by_arclength,
    restrict_to_ball,
)

__all__ = [
    "TAU_GEO",
    "Ball",
    "LineSpec",
    "Point2",
    "Polyline",
    "enclosed_area",
    "hausdorff_distance",
    "point_in_region",
    "polyline_length",
    "resample_by_arclength",
    "restrict_to_ball",
    "SineflowError",
    "InvalidInput",
    "EmbeddednessViolation",
    "OnBoundary",
    "DomainError",
    "ResolutionError",
    "ConstructionError",
    "OutOfHypothesis",
    "EmptyCurve",
    "WindowTooWide",
    "HypothesisViolation",
    "StepRejected",
    "Extinct",
    "InvalidState",
]

__version__ = "0.1.0"
