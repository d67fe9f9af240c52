from .core.factory import get_detector
from .core.base_detector import ChangePointDetector
from .core.types import (
    FdpvParams,
    PiecewiseSpec,
    PlscParams,
    Segmentation,
    TimeSeries,
    piecewise_mean_function,
    validate_series,
)

__all__ = [
    "get_detector",
    "ChangePointDetector",
    "FdpvParams",
    "PiecewiseSpec",
    "PlscParams",
    "Segmentation",
    "TimeSeries",
    "piecewise_mean_function",
    "validate_series",
]
