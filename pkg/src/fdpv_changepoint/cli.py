# src/fdpv_changepoint/cli.py
"""
Command-line interface: simulate, detect, wavelet, bench and score.

File formats
------------
SeriesFile
    One sample per line, UTF-8, decimal point ".". Lines starting with "#"
    are comments. Written with ``repr(float)`` so that the same seed gives a
    byte-identical file.
ResultFile (JSON, ``"schema": 1``)
    ``{schema, n, method, params, change_points, pvalues, levels,
    runtime_seconds}``; ``pvalues`` is null for methods that do not compute
    them.
Truth sidecar (``<out>.truth.json``)
    ``{schema, kind, n, boundaries, levels, sigma, dt, seed}`` written by
    ``simulate`` and read by ``score``.
Index sidecar (``<out>.index.csv``)
    Columns ``i, shift, time``: position in the log-squared series, first
    sample of the dilated support, and support centre in original samples.

Exit codes: 0 success, 2 argument error, 3 I/O or format error,
4 computation error, 130 interrupted.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd

from .core.errors import (
    ChangePointError,
    InvalidParameterError,
    SeriesFileError,
    UnsupportedWaveletError,
)
from .core.factory import get_detector
from .core.types import PiecewiseSpec, Segmentation, TimeSeries, piecewise_mean_function
from .core.utils import DEFAULT_SEED, atomic_write_text
from .engines.fdpv_detector import FdpvDetector
from .evaluation.bench import METHODS, BenchConfig, run_complexity_sweep, run_monte_carlo
from .evaluation.metrics import score_segmentation
from .signals.simulate import (
    reference_hurst_spec,
    reference_mean_spec,
    simulate_piecewise_fbm,
    simulate_piecewise_gaussian,
)
from .signals.wavelet import (
    DEFAULT_FREQUENCY,
    DEFAULT_RESOLUTION,
    DEFAULT_WAVELET,
    PIPELINE_ALPHA,
    PIPELINE_WINDOW,
    build_wavelet,
    log_square_series,
    wavelet_coefficients,
)

logger = logging.getLogger(__name__)

SCHEMA = 1
EXIT_OK = 0
EXIT_ARGS = 2
EXIT_IO = 3
EXIT_COMPUTE = 4
EXIT_INTERRUPTED = 130


# ----------------------------
# File formats
# ----------------------------
def read_series(path: str | Path) -> TimeSeries:
    """
    Parse a SeriesFile.

    Raises
    ------
    SeriesFileError
        No samples, more than one column, or a sample that is not a finite real.
    OSError
        The file cannot be opened.
    """
    try:
        frame = pd.read_csv(path, comment="#", header=None, skip_blank_lines=True, dtype=str)
    except pd.errors.EmptyDataError as exc:
        raise SeriesFileError(f"{path}: no samples.") from exc
    except pd.errors.ParserError as exc:
        raise SeriesFileError(f"{path}: {exc}") from exc
    if frame.shape[1] != 1:
        raise SeriesFileError(f"{path}: expected a single column, found {frame.shape[1]}.")

    raw = frame.iloc[:, 0].str.strip()
    values = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise SeriesFileError(f"{path}: sample {i} ({raw.iloc[i]!r}) is not a finite number.")
    if values.size == 0:
        raise SeriesFileError(f"{path}: no samples.")
    return TimeSeries(values)


def format_series(values: np.ndarray) -> str:
    return "".join(f"{float(v)!r}\n" for v in values)


def write_series(path: str | Path, values: np.ndarray) -> None:
    atomic_write_text(path, format_series(values))


def _write_json(path: str | Path, payload: dict[str, Any]) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2) + "\n")


def _write_frame(path: str | Path, frame: pd.DataFrame) -> None:
    atomic_write_text(path, frame.to_csv(index=False, lineterminator="\n"))


def _read_json(path: str | Path) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SeriesFileError(f"{path}: invalid JSON ({exc}).") from exc
    if not isinstance(data, dict):
        raise SeriesFileError(f"{path}: expected a JSON object.")
    return data


def result_payload(seg: Segmentation, method: str, params: dict[str, Any], runtime: float) -> dict[str, Any]:
    return {
        "schema": SCHEMA,
        "n": seg.n,
        "method": method,
        "params": params,
        "change_points": list(seg.change_points),
        "pvalues": None if seg.pvalues is None else list(seg.pvalues),
        "levels": list(seg.levels),
        "runtime_seconds": runtime,
    }


def read_result(path: str | Path) -> Segmentation:
    """Load a ResultFile back into a Segmentation."""
    data = _read_json(path)
    if data.get("schema") != SCHEMA:
        raise SeriesFileError(f"{path}: unsupported schema {data.get('schema')!r}.")
    try:
        return Segmentation(
            n=int(data["n"]),
            change_points=tuple(data["change_points"]),
            levels=tuple(data["levels"]),
            pvalues=None if data.get("pvalues") is None else tuple(data["pvalues"]),
        )
    except (KeyError, TypeError, InvalidParameterError) as exc:
        raise SeriesFileError(f"{path}: malformed result file ({exc}).") from exc


def read_truth(path: str | Path) -> tuple[int, PiecewiseSpec]:
    """Load a truth sidecar: series length and ground-truth spec."""
    data = _read_json(path)
    try:
        n = int(data["n"])
        spec = PiecewiseSpec(tuple(data["boundaries"]), tuple(data["levels"])).check(n)
    except (KeyError, TypeError, InvalidParameterError) as exc:
        raise SeriesFileError(f"{path}: malformed truth file ({exc}).") from exc
    return n, spec


def _sidecar(out: str | Path, suffix: str) -> Path:
    out = Path(out)
    return out.with_name(out.name + suffix)


# ----------------------------
# Argument types
# ----------------------------
def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _methods(text: str) -> tuple[str, ...]:
    names = tuple(v.strip().lower() for v in text.split(",") if v.strip())
    unknown = [v for v in names if v not in METHODS]
    if unknown or not names:
        raise argparse.ArgumentTypeError(f"methods must be among {', '.join(METHODS)}, got {text!r}")
    return names


# ----------------------------
# Argument builders
# ----------------------------
def add_simulate(subparsers) -> None:
    sp = subparsers.add_parser("simulate", help="Simulate a piecewise mean or piecewise Hurst series")
    sp.add_argument("kind", choices=["mean", "hurst"])
    sp.add_argument("-n", "--length", type=int, default=None,
                    help="Series length N (mean, default 5000) or horizon T (hurst, default 100000).")
    sp.add_argument("--boundaries", type=_int_list, default=None,
                    help="Comma-separated change points; default: the reference configuration.")
    sp.add_argument("--levels", type=_float_list, default=None,
                    help="Comma-separated segment means (mean) or Hurst indices (hurst).")
    sp.add_argument("--sigma", type=float, default=1.0, help="Noise deviation for kind=mean (default: 1).")
    sp.add_argument("--dt", type=float, default=None,
                    help="Time step for kind=hurst (default: 1/T, unit-interval fBm).")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("-o", "--out", required=True, help="SeriesFile to write.")


def add_detect_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=list(METHODS), default="fdpv")
    p.add_argument("-A", "--window", type=int, default=None, help="FDpV window A (required for fdpv).")
    p.add_argument("--kmax", type=int, default=10)
    p.add_argument("--alpha", type=float, default=None, help="FDpV critical p-value (default: 1e-4).")
    p.add_argument("--min-gap", type=int, default=None, help="FDpV exclusion radius (default: A).")
    p.add_argument("--penalty", type=float, default=None, help="PLSC penalty (default: 2 sigma^2 ln N).")
    p.add_argument("--memory-mode", choices=["lean", "full-matrix"], default="lean")
    p.add_argument("--sigma", type=float, default=None,
                   help="Known noise deviation; otherwise estimated from the data.")


def add_detect(subparsers) -> None:
    sp = subparsers.add_parser("detect", help="Detect change points in a SeriesFile")
    sp.add_argument("input", help="SeriesFile to segment.")
    add_detect_flags(sp)
    sp.add_argument("--pipeline", choices=["mean", "wavelet"], default="mean",
                    help=f"wavelet: default A={PIPELINE_WINDOW} and alpha={PIPELINE_ALPHA:g} "
                         "for the output of the wavelet command.")
    sp.add_argument("--demean", action="store_true", help="Subtract the series mean first.")
    sp.add_argument("-o", "--out", required=True, help="ResultFile (JSON) to write.")
    sp.add_argument("--emit-hat", default=None, help="CSV of (k, D, abs_D) for fdpv.")
    sp.add_argument("--emit-fit", default=None, help="CSV of (i, x, g_hat).")


def add_wavelet(subparsers) -> None:
    sp = subparsers.add_parser("wavelet", help="Log-squared wavelet coefficients at one frequency")
    sp.add_argument("input", help="SeriesFile holding the path.")
    sp.add_argument("--frequency", type=float, default=DEFAULT_FREQUENCY,
                    help=f"Frequency 1/a (default: {DEFAULT_FREQUENCY:g}).")
    sp.add_argument("--wavelet", default=DEFAULT_WAVELET)
    sp.add_argument("--resolution", type=int, default=DEFAULT_RESOLUTION,
                    help="Wavelet grid points per unit support.")
    sp.add_argument("--demean", action="store_true", help="Subtract the series mean first.")
    sp.add_argument("-o", "--out", required=True, help="SeriesFile of Y to write.")


def add_bench(subparsers) -> None:
    sp = subparsers.add_parser("bench", help="Monte-Carlo study and complexity sweep")
    sp.add_argument("--config", default=None, help="BenchConfig JSON; flags override its values.")
    sp.add_argument("-n", "--length", type=int, default=None)
    sp.add_argument("-m", "--replications", type=int, default=None)
    sp.add_argument("--sigma", type=float, default=None)
    sp.add_argument("--methods", type=_methods, default=None, help="e.g. fdpv,plsc")
    sp.add_argument("-A", "--window", type=int, default=None)
    sp.add_argument("--kmax", type=int, default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--penalty", type=float, default=None)
    sp.add_argument("--memory-mode", choices=["lean", "full-matrix"], default=None)
    sp.add_argument("--sweep", type=_int_list, default=None, help="Comma-separated N values.")
    sp.add_argument("--repeats", type=int, default=None, help="Timing runs per sweep point.")
    sp.add_argument("--no-monte-carlo", action="store_true", help="Only run the sweep.")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--jobs", type=int, default=None, help="Worker processes for replications.")
    sp.add_argument("-o", "--out", required=True, help="Report JSON to write.")
    sp.add_argument("--sweep-out", default=None, help="Sweep CSV (default: <out>.sweep.csv).")


def add_score(subparsers) -> None:
    sp = subparsers.add_parser("score", help="Score a ResultFile against a truth sidecar")
    sp.add_argument("result")
    sp.add_argument("truth")


# ----------------------------
# Commands
# ----------------------------
def cmd_simulate(args: argparse.Namespace) -> int:
    if args.kind == "mean":
        n = 5000 if args.length is None else args.length
        spec = _spec_from_args(args, reference_mean_spec(n), n)
        series = simulate_piecewise_gaussian(spec, n, args.sigma, args.seed)
        values, sigma, dt = series.values, args.sigma, None
    else:
        n = 100_000 if args.length is None else args.length
        spec = _spec_from_args(args, reference_hurst_spec(n), n)
        proc = simulate_piecewise_fbm(spec, n, args.seed, dt=1.0 / n if args.dt is None else args.dt)
        values, sigma, dt = proc.values, None, proc.dt

    write_series(args.out, values)
    _write_json(_sidecar(args.out, ".truth.json"), {
        "schema": SCHEMA,
        "kind": args.kind,
        "n": n,
        "boundaries": list(spec.boundaries),
        "levels": list(spec.levels),
        "sigma": sigma,
        "dt": dt,
        "seed": args.seed,
    })
    print(f"Wrote {n} samples ({args.kind}, K={spec.k}) to {args.out}")
    return EXIT_OK


def _spec_from_args(args: argparse.Namespace, default: PiecewiseSpec, n: int) -> PiecewiseSpec:
    if args.boundaries is None and args.levels is None:
        return default
    if args.levels is None:
        raise InvalidParameterError("--levels is required when --boundaries is given.")
    return PiecewiseSpec(args.boundaries or (), args.levels).check(n)


def cmd_detect(args: argparse.Namespace) -> int:
    kw: dict[str, Any] = {"kmax": args.kmax}
    if args.method == "fdpv":
        if args.pipeline == "wavelet":
            kw.update(window=PIPELINE_WINDOW, alpha=PIPELINE_ALPHA)
        kw.update({k: v for k, v in {"window": args.window, "alpha": args.alpha}.items() if v is not None})
        kw["min_gap"] = args.min_gap
    elif args.pipeline == "wavelet":
        raise InvalidParameterError("--pipeline wavelet is only available for --method fdpv.")
    else:
        kw.update(penalty=args.penalty, memory_mode=args.memory_mode)
    detector = get_detector(args.method, **kw)
    if args.emit_hat and not isinstance(detector, FdpvDetector):
        raise InvalidParameterError("--emit-hat is only available for --method fdpv.")
    if args.sigma is not None and not args.sigma > 0:
        raise InvalidParameterError(f"--sigma must be > 0, got {args.sigma}.")

    series = read_series(args.input)
    if args.sigma is not None:
        series = TimeSeries(series.values, known_sigma=args.sigma)
    if args.demean:
        series = series.demeaned()

    seg = detector.detect(series)
    _write_json(args.out, result_payload(seg, detector.method, detector.params_summary(), detector.last_runtime))

    if args.emit_hat:
        fd = detector.last_derivative
        _write_frame(args.emit_hat, pd.DataFrame({"k": fd.index, "D": fd.values, "abs_D": np.abs(fd.values)}))
    if args.emit_fit:
        _write_frame(args.emit_fit, pd.DataFrame({
            "i": np.arange(series.n),
            "x": series.values,
            "g_hat": seg.fitted(),
        }))

    print(f"{detector.method}: K_hat={seg.k} change_points={list(seg.change_points)}")
    return EXIT_OK


def cmd_wavelet(args: argparse.Namespace) -> int:
    if not args.frequency > 0:
        raise InvalidParameterError(f"--frequency must be > 0, got {args.frequency}.")
    w = build_wavelet(args.wavelet, args.resolution)
    series = read_series(args.input)
    if args.demean:
        series = series.demeaned()

    scale = 1.0 / args.frequency
    ys = log_square_series(wavelet_coefficients(series, w, scale))
    write_series(args.out, ys.values)

    half_width = scale * (w.support[1] - w.support[0]) / 2.0
    _write_frame(_sidecar(args.out, ".index.csv"), pd.DataFrame({
        "i": np.arange(ys.n),
        "shift": ys.shifts,
        "time": ys.shifts + half_width,
    }))
    print(f"Wrote {ys.n} log-squared coefficients (a={scale:g}, {w.name}) to {args.out}")
    return EXIT_OK


def bench_config_from_args(args: argparse.Namespace) -> BenchConfig:
    cfg = BenchConfig.from_dict(_read_json(args.config)) if args.config else BenchConfig()
    fdpv = replace(cfg.fdpv, **{k: v for k, v in {
        "window": args.window, "kmax": args.kmax, "alpha_critic": args.alpha,
    }.items() if v is not None})
    plsc = replace(cfg.plsc, **{k: v for k, v in {
        "penalty": args.penalty, "kmax": args.kmax, "memory_mode": args.memory_mode,
    }.items() if v is not None})
    return cfg.with_overrides(
        n=args.length,
        m=args.replications,
        sigma=args.sigma,
        methods=args.methods,
        sweep=args.sweep,
        sweep_repeats=args.repeats,
        seed=args.seed,
        jobs=args.jobs,
        fdpv=fdpv,
        plsc=plsc,
    )


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = bench_config_from_args(args)
    reports = {} if args.no_monte_carlo else run_monte_carlo(cfg)
    _write_json(args.out, {
        "schema": SCHEMA,
        "config": cfg.to_dict(),
        "reports": {m: r.to_dict() for m, r in reports.items()},
    })
    for m, r in reports.items():
        print(f"{m}: correct K {100 * r.correct_k_fraction:.1f}% MISE={r.mise:.4g} SECP={r.secp}")

    if cfg.sweep:
        table = run_complexity_sweep(cfg)
        _write_frame(args.sweep_out or _sidecar(args.out, ".sweep.csv"), table)
        print(table.to_string(index=False))
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    seg = read_result(args.result)
    n, spec = read_truth(args.truth)
    if seg.n != n:
        raise SeriesFileError(f"Result has N={seg.n} but truth has N={n}.")
    score = score_segmentation(seg, seg.fitted(), spec.boundaries, piecewise_mean_function(spec, n))
    print(json.dumps(score.to_dict(), indent=2))
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "detect": cmd_detect,
    "wavelet": cmd_wavelet,
    "bench": cmd_bench,
    "score": cmd_score,
}


# ----------------------------
# Runner
# ----------------------------
def _run(args: argparse.Namespace) -> int:
    try:
        return COMMANDS[args.command](args)
    except KeyboardInterrupt:
        print("\nInterrupted by user.", file=sys.stderr)
        return EXIT_INTERRUPTED
    except (InvalidParameterError, UnsupportedWaveletError, KeyError) as e:
        print(f"Argument error: {e}", file=sys.stderr)
        return EXIT_ARGS
    except (SeriesFileError, OSError) as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return EXIT_IO
    except (ChangePointError, MemoryError) as e:
        print(f"Computation error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_COMPUTE


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


# ----------------------------
# CLI entrypoint
# ----------------------------
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="changepoints",
        description="Offline change-point detection: FDpV, PLSC and the wavelet pipeline",
    )
    p.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG.")
    sub = p.add_subparsers(dest="command", required=True)

    add_simulate(sub)
    add_detect(sub)
    add_wavelet(sub)
    add_bench(sub)
    add_score(sub)

    return p


def main(argv: Optional[Sequence[str]] = None) -> None:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    rc = _run(args)
    sys.exit(rc)


if __name__ == "__main__":
    main()
