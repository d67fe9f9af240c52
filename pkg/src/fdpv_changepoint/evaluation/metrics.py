# src/fdpv_changepoint/evaluation/metrics.py
"""
Accuracy metrics of the Monte-Carlo study.

- MISE: mean squared difference between the true piecewise function g and
  its estimate g_hat on the sample grid.
- SECP: squared error on change-point locations, only defined when the
  estimated count equals the true count. Locations are normalized by N by
  default (``tau / N``); the raw-index variant is also available.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from ..core.errors import CountMismatchError, LengthMismatchError
from ..core.types import Segmentation, TimeSeries, segment_means


def estimate_g(series: TimeSeries, seg: Segmentation) -> np.ndarray:
    """Piecewise empirical means of `series` between the change points of `seg`."""
    levels = segment_means(series.values, seg.change_points)
    return Segmentation(series.n, seg.change_points, levels).fitted()


def mise(g_hat: Sequence[float] | np.ndarray, g_true: Sequence[float] | np.ndarray) -> float:
    """Per-replication integrated squared error, ``mean((g_hat - g)^2)``."""
    a = np.asarray(g_hat, dtype=float)
    b = np.asarray(g_true, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatchError(f"Length mismatch: {a.shape} vs {b.shape}.")
    return float(np.mean((a - b) ** 2))


def secp(
    tau_hat: Sequence[int], tau_true: Sequence[int], n: int, normalized: bool = True
) -> float:
    """
    Sum of squared change-point errors; ``(tau_hat/N - tau/N)^2`` when normalized.

    Raises
    ------
    CountMismatchError
        If the two configurations have different sizes.
    """
    if len(tau_hat) != len(tau_true):
        raise CountMismatchError(f"Expected {len(tau_true)} change points, got {len(tau_hat)}.")
    diff = np.asarray(tau_hat, dtype=float) - np.asarray(tau_true, dtype=float)
    if normalized:
        diff = diff / n
    return float(np.sum(diff**2))


def summarize(values: Sequence[float]) -> dict[str, float]:
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return {"mean": float("nan"), "median": float("nan"), "max": float("nan")}
    return {"mean": float(arr.mean()), "median": float(np.median(arr)), "max": float(arr.max())}


@dataclass
class MonteCarloReport:
    """
    Aggregate of M replications for one method.

    `secp` / `secp_raw` are None when no replication found the true K.
    """

    method: str
    m: int
    true_k: int
    k_histogram: dict[int, int]
    mise: float
    secp: Optional[float]
    secp_raw: Optional[float]
    runtimes: dict[str, float] = field(default_factory=dict)
    peak_memory: int = 0
    failures: list[dict[str, Any]] = field(default_factory=list)

    @property
    def correct_k_fraction(self) -> float:
        return self.k_histogram.get(self.true_k, 0) / self.m if self.m else 0.0

    @property
    def mean_k(self) -> float:
        total = sum(self.k_histogram.values())
        return sum(k * c for k, c in self.k_histogram.items()) / total if total else float("nan")

    def to_dict(self) -> dict[str, Any]:
        return {
            "method": self.method,
            "m": self.m,
            "true_k": self.true_k,
            "k_histogram": {str(k): c for k, c in sorted(self.k_histogram.items())},
            "correct_k_fraction": self.correct_k_fraction,
            "mean_k": self.mean_k,
            "mise": self.mise,
            "secp": self.secp,
            "secp_raw": self.secp_raw,
            "runtimes": dict(self.runtimes),
            "peak_memory": self.peak_memory,
            "failures": list(self.failures),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "MonteCarloReport":
        return cls(
            method=data["method"],
            m=int(data["m"]),
            true_k=int(data["true_k"]),
            k_histogram={int(k): int(c) for k, c in data["k_histogram"].items()},
            mise=float(data["mise"]),
            secp=None if data["secp"] is None else float(data["secp"]),
            secp_raw=None if data["secp_raw"] is None else float(data["secp_raw"]),
            runtimes={k: float(v) for k, v in data.get("runtimes", {}).items()},
            peak_memory=int(data.get("peak_memory", 0)),
            failures=list(data.get("failures", [])),
        )


@dataclass(frozen=True)
class ReplicationScore:
    """Metrics of one detector run against the ground truth."""

    k_hat: int
    correct_k: bool
    mise: float
    secp: Optional[float]
    secp_raw: Optional[float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "k_hat": self.k_hat,
            "correct_k": self.correct_k,
            "mise": self.mise,
            "secp_normalized": self.secp,
            "secp_raw": self.secp_raw,
        }


def score_segmentation(
    seg: Segmentation,
    g_hat: np.ndarray,
    truth_change_points: Sequence[int],
    g_true: np.ndarray,
) -> ReplicationScore:
    """Score one segmentation; SECP is left empty unless the count is right."""
    correct = seg.k == len(truth_change_points)
    return ReplicationScore(
        k_hat=seg.k,
        correct_k=correct,
        mise=mise(g_hat, g_true),
        secp=secp(seg.change_points, truth_change_points, seg.n) if correct else None,
        secp_raw=secp(seg.change_points, truth_change_points, seg.n, normalized=False) if correct else None,
    )


def aggregate(
    method: str,
    true_k: int,
    scores: Sequence[ReplicationScore],
    runtimes: Sequence[float] = (),
    peak_memory: int = 0,
    failures: Sequence[dict[str, Any]] = (),
) -> MonteCarloReport:
    """Reduce per-replication scores; failed replications are listed, not counted in M."""
    hist: dict[int, int] = {}
    for s in scores:
        hist[s.k_hat] = hist.get(s.k_hat, 0) + 1
    hits = [s for s in scores if s.correct_k]
    return MonteCarloReport(
        method=method,
        m=len(scores),
        true_k=true_k,
        k_histogram=hist,
        mise=float(np.mean([s.mise for s in scores])) if scores else float("nan"),
        secp=float(np.mean([s.secp for s in hits])) if hits else None,
        secp_raw=float(np.mean([s.secp_raw for s in hits])) if hits else None,
        runtimes=summarize(runtimes),
        peak_memory=int(peak_memory),
        failures=list(failures),
    )
