# src/fdpv_changepoint/core/types.py
"""
Shared data model: signals, piecewise specifications, segmentations and
detector parameters.

Conventions
-----------
Indices are 0-based. A change point ``tau`` is the first index of the segment
it opens, so ``mu[i] = levels[k]`` for ``tau_k <= i < tau_{k+1}`` with
``tau_0 = 0`` and ``tau_{K+1} = N``.

All objects are frozen after construction; numpy payloads are copied and
marked read-only, so instances can be shared between workers freely.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .errors import (
    BadSigmaError,
    BoundaryOutOfRangeError,
    EmptySeriesError,
    InvalidParameterError,
    NonFiniteError,
    WindowTooLargeError,
)

MemoryMode = Literal["lean", "full-matrix"]


def _frozen_array(values: Sequence[float] | np.ndarray) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


def _strictly_increasing(xs: Sequence[int]) -> bool:
    return all(b > a for a, b in zip(xs, xs[1:]))


# ----------------------------
# Signals
# ----------------------------
@dataclass(frozen=True, eq=False)
class TimeSeries:
    """
    Uniformly sampled real-valued sequence.

    The constructor only normalizes storage; call `validate_series()` to
    enforce the invariants (non-empty, finite, positive sigma).
    """

    values: np.ndarray
    known_sigma: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.known_sigma is not None:
            object.__setattr__(self, "known_sigma", float(self.known_sigma))

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.n

    def demeaned(self) -> "TimeSeries":
        return TimeSeries(self.values - self.values.mean(), known_sigma=self.known_sigma)


def validate_series(series: TimeSeries) -> TimeSeries:
    """
    Return `series` unchanged if it satisfies the TimeSeries invariants.

    Raises
    ------
    EmptySeriesError
        N = 0.
    NonFiniteError
        A NaN or infinite sample is present.
    BadSigmaError
        `known_sigma` is present but not strictly positive.
    """
    if series.n == 0:
        raise EmptySeriesError("Series is empty.")
    bad = ~np.isfinite(series.values)
    if bad.any():
        first = int(np.flatnonzero(bad)[0])
        raise NonFiniteError(f"Non-finite sample at index {first}.")
    if series.known_sigma is not None and not (series.known_sigma > 0 and math.isfinite(series.known_sigma)):
        raise BadSigmaError(f"known_sigma must be > 0, got {series.known_sigma!r}.")
    return series


# ----------------------------
# Piecewise specifications
# ----------------------------
@dataclass(frozen=True)
class PiecewiseSpec:
    """Boundaries tau_1 < ... < tau_K and K+1 per-segment levels (means or Hurst indices)."""

    boundaries: tuple[int, ...]
    levels: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "boundaries", tuple(int(b) for b in self.boundaries))
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))
        if any(b <= 0 for b in self.boundaries):
            raise BoundaryOutOfRangeError(f"Boundaries must be > 0: {self.boundaries}")
        if not _strictly_increasing(self.boundaries):
            raise InvalidParameterError(f"Boundaries must be strictly increasing: {self.boundaries}")
        if len(self.levels) != len(self.boundaries) + 1:
            raise InvalidParameterError(
                f"Expected {len(self.boundaries) + 1} levels for {len(self.boundaries)} boundaries, "
                f"got {len(self.levels)}."
            )
        if not all(math.isfinite(v) for v in self.levels):
            raise InvalidParameterError("Levels must be finite.")

    @property
    def k(self) -> int:
        return len(self.boundaries)

    def check(self, n: int) -> "PiecewiseSpec":
        """Ensure every boundary is strictly inside (0, n)."""
        if self.boundaries and self.boundaries[-1] >= n:
            raise BoundaryOutOfRangeError(
                f"Boundary {self.boundaries[-1]} is outside the interior of a length-{n} series."
            )
        return self

    def check_hurst(self) -> "PiecewiseSpec":
        """Ensure every level is a valid Hurst index in (0, 1)."""
        for h in self.levels:
            if not 0.0 < h < 1.0:
                raise InvalidParameterError(f"Hurst index must lie in (0, 1), got {h}.")
        return self

    def edges(self, n: int) -> np.ndarray:
        return np.array((0, *self.boundaries, n), dtype=int)


def piecewise_mean_function(spec: PiecewiseSpec, n: int) -> np.ndarray:
    """
    Expand a piecewise specification into its length-`n` step function.

    ``out[i] = levels[k]`` for ``tau_k <= i < tau_{k+1}``.
    """
    spec.check(n)
    return np.repeat(np.asarray(spec.levels, dtype=float), np.diff(spec.edges(n)))


def segment_means(values: np.ndarray, change_points: Sequence[int]) -> tuple[float, ...]:
    """Empirical mean of `values` on every segment delimited by `change_points`."""
    values = np.asarray(values, dtype=float)
    starts = np.array((0, *change_points), dtype=int)
    lengths = np.diff(np.append(starts, values.shape[0]))
    sums = np.add.reduceat(values, starts)
    return tuple(float(s) for s in sums / lengths)


# ----------------------------
# Segmentations
# ----------------------------
@dataclass(frozen=True)
class Segmentation:
    """
    Estimated configuration of change points.

    `levels` holds the per-segment empirical means and `pvalues`, when
    present, one p-value per retained change point.
    """

    n: int
    change_points: tuple[int, ...]
    levels: tuple[float, ...]
    pvalues: Optional[tuple[float, ...]] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "change_points", tuple(int(c) for c in self.change_points))
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))
        if self.pvalues is not None:
            object.__setattr__(self, "pvalues", tuple(float(p) for p in self.pvalues))

        if not _strictly_increasing(self.change_points):
            raise InvalidParameterError(f"Change points must be strictly increasing: {self.change_points}")
        if self.change_points and not (0 < self.change_points[0] and self.change_points[-1] < self.n):
            raise InvalidParameterError(f"Change points must lie in (0, {self.n}).")
        if len(self.levels) != self.k + 1:
            raise InvalidParameterError(f"Expected {self.k + 1} levels, got {len(self.levels)}.")
        if self.pvalues is not None:
            if len(self.pvalues) != self.k:
                raise InvalidParameterError(f"Expected {self.k} p-values, got {len(self.pvalues)}.")
            if any(not 0.0 <= p <= 1.0 for p in self.pvalues):
                raise InvalidParameterError("p-values must lie in [0, 1].")

    @property
    def k(self) -> int:
        return len(self.change_points)

    def as_spec(self) -> PiecewiseSpec:
        return PiecewiseSpec(self.change_points, self.levels)

    def fitted(self) -> np.ndarray:
        """The piecewise-constant estimate g_hat on the sample grid."""
        return piecewise_mean_function(self.as_spec(), self.n)


# ----------------------------
# Detector parameters
# ----------------------------
@dataclass(frozen=True)
class FdpvParams:
    """
    Filtered-derivative p-value parameters.

    window : sliding box size A.
    kmax : maximal number of candidates kept in step 1.
    alpha_critic : p-value threshold.
    min_gap : exclusion radius around a selected candidate (default: window).
    use_known_sigma : standardize with the series' known sigma when present.
    """

    window: int
    kmax: int = 10
    alpha_critic: float = 1e-4
    min_gap: Optional[int] = None
    use_known_sigma: bool = True

    def __post_init__(self) -> None:
        if int(self.window) < 1:
            raise InvalidParameterError(f"window must be >= 1, got {self.window}.")
        if int(self.kmax) < 1:
            raise InvalidParameterError(f"kmax must be >= 1, got {self.kmax}.")
        if not 0.0 < float(self.alpha_critic) < 1.0:
            raise InvalidParameterError(f"alpha_critic must lie in (0, 1), got {self.alpha_critic}.")
        if self.min_gap is not None and int(self.min_gap) < 1:
            raise InvalidParameterError(f"min_gap must be >= 1, got {self.min_gap}.")

    @property
    def exclusion_radius(self) -> int:
        return int(self.window if self.min_gap is None else self.min_gap)

    def check_against(self, n: int) -> "FdpvParams":
        if 2 * self.window > n:
            raise WindowTooLargeError(f"Window A={self.window} requires N >= {2 * self.window}, got N={n}.")
        return self


@dataclass(frozen=True)
class PlscParams:
    """
    Penalized least-squares parameters.

    penalty : beta per change point; None selects `choose_penalty()`.
    kmax : cap on the number of change points.
    memory_mode : "lean" (costs from cumulative sums) or "full-matrix"
        (materialize the N x N cost matrix).
    max_matrix_bytes : refuse to allocate a full matrix larger than this.
    """

    penalty: Optional[float] = None
    kmax: int = 10
    memory_mode: MemoryMode = "lean"
    max_matrix_bytes: int = field(default=2 * 1024**3)

    def __post_init__(self) -> None:
        if self.penalty is not None and not float(self.penalty) >= 0.0:
            raise InvalidParameterError(f"penalty must be >= 0, got {self.penalty}.")
        if int(self.kmax) < 1:
            raise InvalidParameterError(f"kmax must be >= 1, got {self.kmax}.")
        if self.memory_mode not in ("lean", "full-matrix"):
            raise InvalidParameterError(f"Unknown memory_mode {self.memory_mode!r}.")
