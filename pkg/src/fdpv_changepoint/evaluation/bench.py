# src/fdpv_changepoint/evaluation/bench.py
"""
Monte-Carlo driver and complexity sweep.

Replication i simulates its series from ``split_seed(seed, i)`` and every
enabled method is run on that same series, so enabling or disabling a
method never changes another method's input.
"""
from __future__ import annotations

import logging
import statistics
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Optional

import pandas as pd
from joblib import Parallel, delayed

from ..core.base_detector import ChangePointDetector
from ..core.errors import ChangePointError, InvalidParameterError
from ..core.factory import get_detector
from ..core.types import FdpvParams, PiecewiseSpec, PlscParams, piecewise_mean_function
from ..core.utils import DEFAULT_SEED, split_seed
from ..signals.simulate import reference_mean_spec, simulate_piecewise_gaussian
from .metrics import MonteCarloReport, aggregate, score_segmentation

logger = logging.getLogger(__name__)

METHODS = ("fdpv", "plsc")
SWEEP_COLUMNS = ["n", "method", "wall_time", "peak_memory", "status"]


@dataclass(frozen=True)
class BenchConfig:
    """
    Monte-Carlo / sweep configuration.

    `spec` defaults to the five-change reference configuration rescaled to
    `n`; sweep sizes reuse the boundaries of `spec` rescaled proportionally.
    """

    n: int = 5000
    m: int = 200
    sigma: float = 1.0
    spec: Optional[PiecewiseSpec] = None
    fdpv: FdpvParams = field(default_factory=lambda: FdpvParams(window=300))
    plsc: PlscParams = field(default_factory=PlscParams)
    methods: tuple[str, ...] = METHODS
    seed: int = DEFAULT_SEED
    sweep: tuple[int, ...] = ()
    sweep_repeats: int = 3
    jobs: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "sweep", tuple(int(v) for v in self.sweep))
        if self.m < 1:
            raise InvalidParameterError(f"m must be >= 1, got {self.m}.")
        if self.sigma < 0:
            raise InvalidParameterError(f"sigma must be >= 0, got {self.sigma}.")
        unknown = set(self.methods) - set(METHODS)
        if unknown or not self.methods:
            raise InvalidParameterError(f"Unknown or empty methods: {sorted(unknown) or self.methods}.")
        if any(b <= a for a, b in zip(self.sweep, self.sweep[1:])):
            raise InvalidParameterError(f"Sweep sizes must be strictly increasing: {self.sweep}.")
        if self.sweep_repeats < 1:
            raise InvalidParameterError("sweep_repeats must be >= 1.")
        if self.spec is not None:
            self.spec.check(self.n)

    def spec_for(self, n: int) -> PiecewiseSpec:
        if self.spec is None:
            return reference_mean_spec(n)
        if n == self.n:
            return self.spec
        scaled = tuple(round(b * n / self.n) for b in self.spec.boundaries)
        return PiecewiseSpec(scaled, self.spec.levels)

    # ----------------------------
    # (De)serialization
    # ----------------------------
    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["spec"] = None if self.spec is None else {
            "boundaries": list(self.spec.boundaries),
            "levels": list(self.spec.levels),
        }
        out["methods"] = list(self.methods)
        out["sweep"] = list(self.sweep)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BenchConfig":
        data = dict(data)
        if data.get("spec") is not None:
            data["spec"] = PiecewiseSpec(tuple(data["spec"]["boundaries"]), tuple(data["spec"]["levels"]))
        if isinstance(data.get("fdpv"), dict):
            data["fdpv"] = FdpvParams(**data["fdpv"])
        if isinstance(data.get("plsc"), dict):
            data["plsc"] = PlscParams(**data["plsc"])
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise InvalidParameterError(f"Unknown bench config keys: {sorted(extra)}")
        return cls(**data)

    def with_overrides(self, **changes: Any) -> "BenchConfig":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


def make_detector(method: str, cfg: BenchConfig) -> ChangePointDetector:
    """Build `method` through `get_detector` from the parameter blocks of `cfg`."""
    if method == "fdpv":
        p = cfg.fdpv
        return get_detector(
            "fdpv",
            window=p.window,
            kmax=p.kmax,
            alpha=p.alpha_critic,
            min_gap=p.min_gap,
            use_known_sigma=p.use_known_sigma,
        )
    p = cfg.plsc
    return get_detector(
        method,
        penalty=p.penalty,
        kmax=p.kmax,
        memory_mode=p.memory_mode,
        max_matrix_bytes=p.max_matrix_bytes,
    )


# ----------------------------
# Monte-Carlo
# ----------------------------
def _replication(cfg: BenchConfig, index: int) -> dict[str, dict[str, Any]]:
    spec = cfg.spec_for(cfg.n)
    series = simulate_piecewise_gaussian(spec, cfg.n, cfg.sigma, split_seed(cfg.seed, index))
    g_true = piecewise_mean_function(spec, cfg.n)

    out: dict[str, dict[str, Any]] = {}
    for method in cfg.methods:
        det = make_detector(method, cfg)
        try:
            seg = det.detect(series)
        except (ChangePointError, MemoryError) as exc:
            logger.warning("Replication %d: %s failed: %s", index, method, exc)
            out[method] = {"error": f"{type(exc).__name__}: {exc}"}
            continue
        out[method] = {
            "score": score_segmentation(seg, seg.fitted(), spec.boundaries, g_true),
            "runtime": det.last_runtime,
            "memory": det.memory_bytes,
        }
    return out


def run_monte_carlo(cfg: BenchConfig) -> dict[str, MonteCarloReport]:
    """Simulate `cfg.m` replications, run every enabled method and aggregate per method."""
    logger.info("Monte-Carlo: N=%d M=%d methods=%s jobs=%d", cfg.n, cfg.m, cfg.methods, cfg.jobs)
    results = Parallel(n_jobs=cfg.jobs)(delayed(_replication)(cfg, i) for i in range(cfg.m))

    true_k = cfg.spec_for(cfg.n).k
    reports: dict[str, MonteCarloReport] = {}
    for method in cfg.methods:
        scores, runtimes, failures, peak = [], [], [], 0
        for i, res in enumerate(results):
            entry = res[method]
            if "error" in entry:
                failures.append({"replication": i, "error": entry["error"]})
                continue
            scores.append(entry["score"])
            runtimes.append(entry["runtime"])
            peak = max(peak, entry["memory"])
        reports[method] = aggregate(method, true_k, scores, runtimes, peak, failures)
        logger.info(
            "%s: correct K in %.1f%%, MISE=%.4g, SECP=%s",
            method, 100 * reports[method].correct_k_fraction, reports[method].mise, reports[method].secp,
        )
    return reports


# ----------------------------
# Complexity sweep
# ----------------------------
def run_complexity_sweep(cfg: BenchConfig) -> pd.DataFrame:
    """
    Median wall time over `cfg.sweep_repeats` runs and accounted peak memory,
    per method and per N in `cfg.sweep`. Runs are sequential.

    Infeasible sizes (MemoryError, window too large, boundaries that collide
    once rescaled) are recorded as rows with a non-"ok" status instead of
    aborting the sweep.
    """
    if not cfg.sweep:
        raise InvalidParameterError("Complexity sweep needs at least one size.")
    rows: list[dict[str, Any]] = []
    for n in cfg.sweep:
        try:
            series = simulate_piecewise_gaussian(cfg.spec_for(n), n, cfg.sigma, split_seed(cfg.seed, n))
        except ChangePointError as exc:
            status = f"error: {type(exc).__name__}: {exc}"
            logger.warning("sweep N=%d: %s", n, status)
            rows.extend(
                {"n": n, "method": method, "wall_time": float("nan"), "peak_memory": 0, "status": status}
                for method in cfg.methods
            )
            continue
        for method in cfg.methods:
            det = make_detector(method, cfg)
            times: list[float] = []
            status = "ok"
            try:
                for _ in range(cfg.sweep_repeats):
                    det.detect(series)
                    times.append(det.last_runtime)
            except MemoryError as exc:
                status = f"infeasible: {exc}"
            except ChangePointError as exc:
                status = f"error: {type(exc).__name__}: {exc}"
            rows.append({
                "n": n,
                "method": method,
                "wall_time": statistics.median(times) if times else float("nan"),
                "peak_memory": det.memory_bytes if times else 0,
                "status": status,
            })
            logger.info("sweep N=%d %s: %s", n, method, rows[-1])
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)
