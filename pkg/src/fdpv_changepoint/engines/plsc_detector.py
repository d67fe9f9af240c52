# src/fdpv_changepoint/engines/plsc_detector.py
"""
Penalized least-squares (PLSC) segmentation by dynamic programming.

Minimizes ``sum_k cost(segment_k) + beta * K`` over every segmentation with at
most Kmax change points. ``L[k, t]`` is the best cost of ``x[0:t]`` cut into
k+1 segments and ``L[k, t] = min_s L[k-1, s] + cost(x[s:t])``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from ..core.base_detector import ChangePointDetector
from ..core.errors import IndexOutOfRangeError
from ..core.types import PlscParams, Segmentation, TimeSeries, segment_means
from ..core.utils import nbytes

logger = logging.getLogger(__name__)

#: Median of the chi-square distribution with one degree of freedom.
CHI2_1_MEDIAN = 0.4549364231195724


@dataclass(frozen=True, eq=False)
class CostStructure:
    """
    Prefix sums ``s1[t] = sum(x[:t])`` and ``s2[t] = sum(x[:t]**2)`` (length N+1),
    plus the optional full matrix ``matrix[s, j] = cost(s, j)``.
    """

    s1: np.ndarray
    s2: np.ndarray
    matrix: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return int(self.s1.shape[0] - 1)

    @property
    def nbytes(self) -> int:
        return nbytes(self.s1, self.s2, self.matrix)


def build_costs(x: np.ndarray, full_matrix: bool = False) -> CostStructure:
    x = np.asarray(x, dtype=float)
    s1 = np.concatenate(([0.0], np.cumsum(x)))
    s2 = np.concatenate(([0.0], np.cumsum(x * x)))
    cs = CostStructure(s1=s1, s2=s2)
    if not full_matrix:
        return cs
    n = x.shape[0]
    matrix = np.zeros((n, n), dtype=float)
    for t in range(1, n + 1):
        matrix[:t, t - 1] = costs_ending_at(cs, t)
    return CostStructure(s1=s1, s2=s2, matrix=matrix)


def costs_ending_at(cs: CostStructure, t: int) -> np.ndarray:
    """Vector of cost(x[s:t]) for s = 0 .. t-1."""
    lengths = t - np.arange(t, dtype=float)
    c = (cs.s2[t] - cs.s2[:t]) - (cs.s1[t] - cs.s1[:t]) ** 2 / lengths
    np.maximum(c, 0.0, out=c)
    c[t - 1] = 0.0
    return c


def segment_cost(cs: CostStructure, i: int, j: int) -> float:
    """
    Within-segment sum of squared residuals of x[i..j] (inclusive) around its mean.

    Raises
    ------
    IndexOutOfRangeError
        Unless 0 <= i <= j < N.
    """
    if not 0 <= i <= j < cs.n:
        raise IndexOutOfRangeError(f"Invalid segment [{i}, {j}] for N={cs.n}.")
    if cs.matrix is not None:
        return float(cs.matrix[i, j])
    if i == j:
        return 0.0
    t = j + 1
    c = (cs.s2[t] - cs.s2[i]) - (cs.s1[t] - cs.s1[i]) ** 2 / float(t - i)
    return float(max(c, 0.0))


def choose_penalty(series: TimeSeries) -> float:
    """
    Default penalty ``beta = 2 * sigma^2 * log(N)``.

    sigma^2 is the series' known variance when present, otherwise the robust
    difference-based estimate ``median(diff(x)**2) / (2 * 0.4549)``.
    """
    n = series.n
    if n < 2:
        return 0.0
    if series.known_sigma is not None:
        var = series.known_sigma ** 2
    else:
        var = float(np.median(np.diff(series.values) ** 2)) / (2.0 * CHI2_1_MEDIAN)
    return 2.0 * var * math.log(n)


class PlscDetector(ChangePointDetector):
    method = "plsc"

    def __init__(self, params: PlscParams):
        super().__init__()
        self.params = params
        self.last_penalty: Optional[float] = None

    def _detect(self, series: TimeSeries) -> Segmentation:
        p = self.params
        x = series.values
        n = series.n
        beta = choose_penalty(series) if p.penalty is None else float(p.penalty)
        self.last_penalty = beta

        full = p.memory_mode == "full-matrix"
        if full and n * n * 8 > p.max_matrix_bytes:
            raise MemoryError(
                f"Full cost matrix for N={n} needs {n * n * 8 / 1e6:.0f} MB "
                f"(limit {p.max_matrix_bytes / 1e6:.0f} MB)."
            )
        cs = build_costs(x, full_matrix=full)

        kmax = min(p.kmax, n - 1)
        best = np.full((kmax + 1, n + 1), np.inf)
        back = np.zeros((kmax + 1, n + 1), dtype=np.int64)
        rows = np.arange(kmax)

        for t in range(1, n + 1):
            c = cs.matrix[:t, t - 1] if full else costs_ending_at(cs, t)
            best[0, t] = c[0]
            if kmax and t >= 2:
                cand = best[:kmax, :t] + c
                idx = np.argmin(cand, axis=1)
                best[1:, t] = cand[rows, idx]
                back[1:, t] = idx

        totals = best[:, n] + beta * np.arange(kmax + 1)
        k_hat = int(np.argmin(totals))

        change_points: list[int] = []
        t = n
        for k in range(k_hat, 0, -1):
            t = int(back[k, t])
            change_points.append(t)
        change_points.reverse()

        self.memory_bytes = cs.nbytes + nbytes(best, back)
        logger.debug("plsc beta=%.4g K_hat=%d objective=%.6g", beta, k_hat, totals[k_hat])

        return Segmentation(
            n=n,
            change_points=tuple(change_points),
            levels=segment_means(x, change_points),
        )

    def params_summary(self) -> dict[str, Any]:
        p = self.params
        return {
            "penalty": p.penalty if p.penalty is not None else self.last_penalty,
            "kmax": p.kmax,
            "memory_mode": p.memory_mode,
        }


def plsc_detect(series: TimeSeries, params: PlscParams) -> Segmentation:
    """Run the penalized least-squares dynamic program on `series`."""
    return PlscDetector(params).detect(series)


def plsc_objective(series: TimeSeries, change_points: tuple[int, ...], penalty: float) -> float:
    """Penalized cost of a given segmentation, summed left to right like the DP."""
    cs = build_costs(series.values)
    edges = (0, *change_points, series.n)
    total = segment_cost(cs, edges[0], edges[1] - 1)
    for s, t in zip(edges[1:-1], edges[2:]):
        total += segment_cost(cs, s, t - 1)
    return total + penalty * len(change_points)
