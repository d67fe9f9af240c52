from __future__ import annotations

import logging
import time
from abc import ABC, abstractmethod
from typing import Any, Optional

from .types import Segmentation, TimeSeries, validate_series

logger = logging.getLogger(__name__)


class ChangePointDetector(ABC):
    """
    Abstract base class for offline change-point detectors.

    This interface standardizes:
      - Input validation (every run goes through `validate_series()`)
      - Timing of the last run (`last_runtime`, seconds)
      - Memory accounting of the detector's own structures (`memory_bytes`)
      - A JSON-ready parameter summary for result files

    Concrete engines implement `_detect()` and `params_summary()`, and set
    `self.memory_bytes` to the bytes held by their working arrays (cost
    matrix, filtered-derivative vector, ...) during `_detect()`.
    """

    #: Short method identifier used in result files ("fdpv", "plsc").
    method: str = ""

    def __init__(self) -> None:
        self.memory_bytes: int = 0
        self.last_runtime: Optional[float] = None

    # ----------------------------
    # Detection
    # ----------------------------
    def detect(self, series: TimeSeries) -> Segmentation:
        """Validate `series`, run the engine and record runtime and memory."""
        validate_series(series)
        self.memory_bytes = 0
        start = time.perf_counter()
        try:
            seg = self._detect(series)
        finally:
            self.last_runtime = time.perf_counter() - start
        logger.debug(
            "%s: N=%d K_hat=%d in %.4fs (%d bytes accounted)",
            self.method, series.n, seg.k, self.last_runtime, self.memory_bytes,
        )
        return seg

    @abstractmethod
    def _detect(self, series: TimeSeries) -> Segmentation:
        """Engine-specific detection on an already validated series."""
        ...

    @abstractmethod
    def params_summary(self) -> dict[str, Any]:
        """
        Return the detector parameters as a JSON-serializable dict.
        Written verbatim into the `params` field of result files.
        """
        ...

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params_summary().items())
        return f"{type(self).__name__}({inner})"
