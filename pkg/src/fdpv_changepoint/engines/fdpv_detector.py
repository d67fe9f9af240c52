# src/fdpv_changepoint/engines/fdpv_detector.py
"""
Filtered derivative with p-value (FDpV) detector.

Step 1 computes D(A, k) = mean(x[k:k+A]) - mean(x[k-A:k]) for A <= k <= N-A in
one O(N) pass and keeps up to Kmax local maxima of |D| as candidates. Step 2
gives every candidate a p-value computed on its adaptive window (distance to
the neighbouring candidates) and keeps the candidates below alpha_critic.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np
from scipy.special import ndtr

from ..core.base_detector import ChangePointDetector
from ..core.errors import WindowTooLargeError
from ..core.types import FdpvParams, Segmentation, TimeSeries, segment_means

logger = logging.getLogger(__name__)

#: The running sum is recomputed from scratch every this many steps.
RESEED_INTERVAL = 1 << 16
#: Recurrence steps evaluated per vectorized block.
BLOCK_SIZE = 1 << 12


def scratch_bytes(m: int) -> int:
    """Working memory of `filtered_derivative` beyond its length-`m` output."""
    return 2 * _block_size(m) * np.dtype(float).itemsize


def _block_size(m: int) -> int:
    return max(1, min(BLOCK_SIZE, RESEED_INTERVAL, m))


def _values(series: TimeSeries | np.ndarray | Sequence[float]) -> np.ndarray:
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=float)


@dataclass(frozen=True, eq=False)
class FilteredDerivative:
    """D(A, k) for k = A .. N-A; ``values[j]`` belongs to ``k = window + j``."""

    window: int
    n: int
    values: np.ndarray

    @property
    def index(self) -> np.ndarray:
        return np.arange(self.window, self.n - self.window + 1)

    def at(self, k: int) -> float:
        return float(self.values[k - self.window])


@dataclass(frozen=True)
class CandidateSet:
    """Step-1 candidates with their step-2 statistics, in ascending order."""

    candidates: tuple[int, ...]
    amplitudes: tuple[float, ...]
    windows: tuple[int, ...]
    sigmas: tuple[float, ...]
    pvalues: tuple[float, ...]


# ----------------------------
# Step 1: filtered derivative and candidates
# ----------------------------
def filtered_derivative(series: TimeSeries | np.ndarray, window: int) -> FilteredDerivative:
    """
    One-pass filtered derivative.

    Uses ``A*D(A,k+1) = A*D(A,k) + x[k+A] - 2*x[k] + x[k-A]`` seeded by a
    direct sum at k = A and re-seeded every `RESEED_INTERVAL` steps.

    Raises
    ------
    WindowTooLargeError
        If 2A > N.
    """
    x = _values(series)
    n = int(x.shape[0])
    a = int(window)
    if a < 1 or 2 * a > n:
        raise WindowTooLargeError(f"Window A={a} requires N >= {2 * a}, got N={n}.")

    m = n - 2 * a + 1
    out = np.empty(m, dtype=float)
    step = np.empty(_block_size(m), dtype=float)

    def direct(k: int) -> float:
        return float(np.sum(x[k:k + a]) - np.sum(x[k - a:k]))

    ad = direct(a)
    out[0] = ad / a
    j = 1
    while j < m:
        if j % RESEED_INTERVAL == 0:
            ad = direct(a + j)
            out[j] = ad / a
            j += 1
            continue
        # out[j:stop] from k = a+j-1 .. a+stop-2; x is read through views only
        stop = min(m, j + step.size, (j // RESEED_INTERVAL + 1) * RESEED_INTERVAL)
        size = stop - j
        inc = step[:size]
        np.add(x[j - 1 + 2 * a: stop - 1 + 2 * a], x[j - 1: stop - 1], out=inc)
        inc -= 2.0 * x[j - 1 + a: stop - 1 + a]
        inc[0] += ad
        np.cumsum(inc, out=inc)
        ad = float(inc[-1])
        np.divide(inc, a, out=out[j:stop])
        j = stop

    out.setflags(write=False)
    return FilteredDerivative(window=a, n=n, values=out)


def select_candidates(fd: FilteredDerivative, kmax: int, min_gap: int) -> tuple[int, ...]:
    """
    Iterative argmax of |D| with exclusion radius `min_gap`.

    Stops after `kmax` picks or once the remaining maximum is 0. Ties go to
    the smaller index. Returned indices are series positions, ascending.
    """
    amp = np.abs(fd.values).astype(float, copy=True)
    picked: list[int] = []
    while len(picked) < kmax and amp.size:
        j = int(np.argmax(amp))
        if not amp[j] > 0.0:
            break
        picked.append(j)
        amp[max(0, j - min_gap): j + min_gap + 1] = -1.0
    return tuple(sorted(fd.window + j for j in picked))


def adaptive_windows(candidates: Sequence[int], n: int) -> tuple[int, ...]:
    """A_k = min(c_k - c_{k-1}, c_{k+1} - c_k) with c_0 = 0 and c_{m+1} = n."""
    ext = (0, *candidates, n)
    return tuple(
        min(ext[i] - ext[i - 1], ext[i + 1] - ext[i]) for i in range(1, len(ext) - 1)
    )


# ----------------------------
# Step 2: p-values
# ----------------------------
def box_sigma(series: TimeSeries | np.ndarray, left: int, right: int) -> float:
    """Unbiased empirical standard deviation of x strictly inside (left, right); 0 when constant."""
    box = _values(series)[left + 1:right]
    if box.size < 2 or np.ptp(box) == 0.0:
        return 0.0
    return float(np.std(box, ddof=1))


def pvalue(
    series: TimeSeries | np.ndarray,
    candidate: int,
    window: int,
    left: int,
    right: int,
    sigma: Optional[float] = None,
) -> float:
    """
    Upper-tail normal p-value of the filtered derivative at `candidate`.

    D is recomputed at the adaptive `window`; the standardization uses
    `sigma` when given, otherwise the empirical deviation on (left, right).
    A zero deviation yields 0 when |D| > 0 and 0.5 otherwise.
    """
    x = _values(series)
    c, w = int(candidate), int(window)
    if w < 1 or c - w < 0 or c + w > x.shape[0]:
        raise WindowTooLargeError(f"Window {w} does not fit around index {c}.")
    d = abs(float(np.mean(x[c:c + w]) - np.mean(x[c - w:c])))
    s = box_sigma(x, left, right) if sigma is None else float(sigma)
    if not s > 0.0:
        logger.debug("Degenerate variance on (%d, %d) around candidate %d", left, right, c)
        return 0.0 if d > 0.0 else 0.5
    z = math.sqrt(w / 2.0) * d / s
    return float(ndtr(-z))


def score_candidates(
    series: TimeSeries, candidates: Sequence[int], sigma: Optional[float] = None
) -> CandidateSet:
    """Adaptive windows, local sigmas and p-values for every usable candidate."""
    x = series.values
    n = series.n
    windows = adaptive_windows(candidates, n)
    ext = (0, *candidates, n)

    kept: list[tuple[int, float, int, float, float]] = []
    for i, (c, a_k) in enumerate(zip(candidates, windows), start=1):
        w = min(a_k, c, n - c)
        if w < 2:
            logger.debug("Discarding candidate %d: no window >= 2 fits", c)
            continue
        left, right = ext[i - 1], ext[i + 1]
        s = box_sigma(x, left, right) if sigma is None else sigma
        p = pvalue(x, c, w, left, right, sigma=s)
        amp = abs(float(np.mean(x[c:c + w]) - np.mean(x[c - w:c])))
        kept.append((c, amp, w, s, p))

    cols = list(zip(*kept)) if kept else [(), (), (), (), ()]
    return CandidateSet(*(tuple(col) for col in cols))


# ----------------------------
# Detector engine
# ----------------------------
class FdpvDetector(ChangePointDetector):
    method = "fdpv"

    def __init__(self, params: FdpvParams):
        super().__init__()
        self.params = params
        self.last_derivative: Optional[FilteredDerivative] = None
        self.last_candidates: Optional[CandidateSet] = None

    def _detect(self, series: TimeSeries) -> Segmentation:
        p = self.params.check_against(series.n)
        fd = filtered_derivative(series, p.window)
        candidates = select_candidates(fd, p.kmax, p.exclusion_radius)
        sigma = series.known_sigma if p.use_known_sigma else None
        scored = score_candidates(series, candidates, sigma=sigma)

        retained = [(c, pv) for c, pv in zip(scored.candidates, scored.pvalues) if pv < p.alpha_critic]
        change_points = tuple(c for c, _ in retained)
        pvalues = tuple(pv for _, pv in retained)

        # D vector, the masked amplitude copy used by candidate selection and the block scratch
        self.memory_bytes = 2 * fd.values.nbytes + scratch_bytes(fd.values.size)
        self.last_derivative = fd
        self.last_candidates = scored
        logger.debug("fdpv candidates=%s pvalues=%s", scored.candidates, scored.pvalues)

        return Segmentation(
            n=series.n,
            change_points=change_points,
            levels=segment_means(series.values, change_points),
            pvalues=pvalues,
        )

    def params_summary(self) -> dict[str, Any]:
        p = self.params
        return {
            "window": p.window,
            "kmax": p.kmax,
            "alpha_critic": p.alpha_critic,
            "min_gap": p.exclusion_radius,
            "use_known_sigma": p.use_known_sigma,
        }


def detect(series: TimeSeries, params: FdpvParams) -> Segmentation:
    """Run the full FDpV pipeline on `series`."""
    return FdpvDetector(params).detect(series)
