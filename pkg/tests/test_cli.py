# tests/test_cli.py
import json

import numpy as np
import pandas as pd
import pytest

from fdpv_changepoint.cli import build_parser, main, read_result, read_series, write_series


def run_cli(*argv: str) -> int:
    with pytest.raises(SystemExit) as exc:
        main([str(a) for a in argv])
    return exc.value.code


def without_timing(path):
    data = json.loads(path.read_text())
    data.pop("runtime_seconds", None)
    for report in data.get("reports", {}).values():
        report.pop("runtimes")
    return data


@pytest.fixture
def step_file(tmp_path):
    path = tmp_path / "step.txt"
    write_series(path, np.r_[np.zeros(50), np.ones(50)])
    return path


def test_parser_requires_a_command():
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args([])
    assert exc.value.code == 2


# ----------------------------
# Series files
# ----------------------------
def test_read_series_skips_comments(tmp_path):
    path = tmp_path / "x.txt"
    path.write_text("# interbeat intervals\n0.81\n0.79\n\n8.2e-1\n", encoding="utf-8")
    assert read_series(path).values.tolist() == [0.81, 0.79, 0.82]


@pytest.mark.parametrize("content", ["", "# only a comment\n", "1.0\nabc\n", "1.0\nnan\n", "1,2\n3,4\n"])
def test_malformed_series_exit_3(tmp_path, content):
    path = tmp_path / "bad.txt"
    path.write_text(content, encoding="utf-8")
    assert run_cli("detect", path, "--method", "plsc", "-o", tmp_path / "r.json") == 3


def test_missing_input_exit_3(tmp_path):
    assert run_cli("detect", tmp_path / "nope.txt", "-A", "5", "-o", tmp_path / "r.json") == 3


# ----------------------------
# simulate
# ----------------------------
def test_simulate_noiseless_constant(tmp_path):
    out = tmp_path / "const.txt"
    assert run_cli("simulate", "mean", "-n", "100", "--sigma", "0", "--levels", "1.0", "-o", out) == 0
    assert out.read_text().splitlines() == ["1.0"] * 100
    truth = json.loads((tmp_path / "const.txt.truth.json").read_text())
    assert truth["boundaries"] == [] and truth["levels"] == [1.0] and truth["n"] == 100


def test_simulate_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    for out in (a, b):
        assert run_cli("simulate", "mean", "-n", "500", "--seed", "42", "-o", out) == 0
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.txt.truth.json").read_bytes() == (tmp_path / "b.txt.truth.json").read_bytes()


def test_simulate_hurst_reference(tmp_path):
    out = tmp_path / "fbm.txt"
    assert run_cli("simulate", "hurst", "-n", "2000", "--seed", "3", "-o", out) == 0
    values = read_series(out).values
    assert values.size == 2000 and values[0] == 0.0
    truth = json.loads((tmp_path / "fbm.txt.truth.json").read_text())
    assert truth["boundaries"] == [250, 510, 861, 1402, 1641]
    assert truth["dt"] == pytest.approx(1 / 2000)


@pytest.mark.parametrize(
    "extra",
    [
        ["--boundaries", "50,20", "--levels", "0,1,2"],
        ["--boundaries", "50", "--levels", "0"],
        ["--boundaries", "50"],
        ["--boundaries", "x,y", "--levels", "0,1"],
    ],
)
def test_simulate_bad_spec_exit_2(tmp_path, extra):
    assert run_cli("simulate", "mean", "-n", "100", *extra, "-o", tmp_path / "x.txt") == 2


def test_simulate_bad_hurst_exit_2(tmp_path):
    assert run_cli("simulate", "hurst", "-n", "100", "--boundaries", "50", "--levels", "0.5,1.2",
                   "-o", tmp_path / "x.txt") == 2


# ----------------------------
# detect
# ----------------------------
def test_detect_noiseless_step(tmp_path, step_file):
    out = tmp_path / "r.json"
    hat, fit = tmp_path / "hat.csv", tmp_path / "fit.csv"
    assert run_cli("detect", step_file, "--method", "fdpv", "-A", "10", "-o", out,
                   "--emit-hat", hat, "--emit-fit", fit) == 0
    data = json.loads(out.read_text())
    assert data["schema"] == 1 and data["method"] == "fdpv" and data["n"] == 100
    assert data["change_points"] == [50]
    assert data["pvalues"][0] < 1e-10
    assert data["levels"] == [0.0, 1.0]
    assert data["params"]["window"] == 10
    assert data["runtime_seconds"] >= 0

    hat_df = pd.read_csv(hat)
    assert list(hat_df.columns) == ["k", "D", "abs_D"]
    assert hat_df.loc[hat_df["abs_D"].idxmax(), "k"] == 50
    fit_df = pd.read_csv(fit)
    assert list(fit_df.columns) == ["i", "x", "g_hat"]
    assert np.array_equal(fit_df["g_hat"], fit_df["x"])


def test_detect_plsc_result_round_trips(tmp_path, step_file):
    out = tmp_path / "r.json"
    assert run_cli("detect", step_file, "--method", "plsc", "--penalty", "1", "-o", out) == 0
    seg = read_result(out)
    assert seg.change_points == (50,)
    assert seg.pvalues is None
    assert json.loads(out.read_text())["params"]["penalty"] == 1.0


def test_detect_demean_and_known_sigma(tmp_path, step_file):
    out = tmp_path / "r.json"
    assert run_cli("detect", step_file, "-A", "10", "--demean", "--sigma", "0.1", "-o", out) == 0
    data = json.loads(out.read_text())
    assert data["change_points"] == [50]
    assert data["levels"] == [-0.5, 0.5]


def test_detect_argument_errors_exit_2(tmp_path, step_file):
    out = tmp_path / "r.json"
    assert run_cli("detect", step_file, "--method", "fdpv", "-o", out) == 2
    assert run_cli("detect", step_file, "--method", "plsc", "--emit-hat", tmp_path / "h.csv", "-o", out) == 2
    assert run_cli("detect", step_file, "--method", "cusum", "-o", out) == 2
    assert run_cli("detect", step_file, "-A", "10", "--alpha", "2", "-o", out) == 2


def test_detect_window_too_large_exit_4(tmp_path, step_file):
    assert run_cli("detect", step_file, "-A", "60", "-o", tmp_path / "r.json") == 4
    assert not (tmp_path / "r.json").exists()


def test_detect_full_matrix_mode(tmp_path, step_file):
    out = tmp_path / "r.json"
    assert run_cli("detect", step_file, "--method", "plsc", "--memory-mode", "full-matrix", "-o", out) == 0
    assert json.loads(out.read_text())["params"]["memory_mode"] == "full-matrix"
    assert read_result(out).change_points == (50,)


def test_detect_wavelet_pipeline_defaults(tmp_path):
    path, out = tmp_path / "y.txt", tmp_path / "r.json"
    write_series(path, np.r_[np.zeros(600), np.ones(600)])

    assert run_cli("detect", path, "--pipeline", "wavelet", "-o", out) == 0
    params = json.loads(out.read_text())["params"]
    assert (params["window"], params["alpha_critic"]) == (500, 1e-11)

    assert run_cli("detect", path, "--pipeline", "wavelet", "-A", "100", "--alpha", "1e-3", "-o", out) == 0
    params = json.loads(out.read_text())["params"]
    assert (params["window"], params["alpha_critic"]) == (100, 1e-3)

    assert run_cli("detect", path, "--method", "plsc", "--pipeline", "wavelet", "-o", out) == 2


@pytest.mark.parametrize("sigma", ["0", "-0.5"])
def test_detect_non_positive_sigma_exit_2(tmp_path, step_file, sigma):
    out = tmp_path / "r.json"
    assert run_cli("detect", step_file, "-A", "10", "--sigma", sigma, "-o", out) == 2
    assert not out.exists()


# ----------------------------
# wavelet
# ----------------------------
def test_wavelet_polynomial_is_all_degenerate(tmp_path):
    path = tmp_path / "poly.txt"
    t = np.arange(400.0)
    write_series(path, 2.0 - 0.5 * t + 0.01 * t**2 - 1e-5 * t**3)
    assert run_cli("wavelet", path, "--frequency", "0.2", "-o", tmp_path / "y.txt") == 4


def test_wavelet_scale_too_large_exit_4(tmp_path):
    path = tmp_path / "short.txt"
    write_series(path, np.random.default_rng(0).normal(size=30))
    assert run_cli("wavelet", path, "--frequency", "0.2", "-o", tmp_path / "y.txt") == 4


def test_wavelet_bad_frequency_exit_2(tmp_path, step_file):
    assert run_cli("wavelet", step_file, "--frequency", "0", "-o", tmp_path / "y.txt") == 2
    assert run_cli("wavelet", step_file, "--wavelet", "haar-ish", "-o", tmp_path / "y.txt") == 2


def test_wavelet_pipeline_files(tmp_path):
    path, out = tmp_path / "fbm.txt", tmp_path / "y.txt"
    assert run_cli("simulate", "hurst", "-n", "3000", "--boundaries", "1500",
                   "--levels", "0.55,0.7", "-o", path) == 0
    assert run_cli("wavelet", path, "--frequency", "0.2", "--wavelet", "daubechies-6", "-o", out) == 0
    ys = read_series(out)
    index = pd.read_csv(tmp_path / "y.txt.index.csv")
    assert ys.n == len(index) == 3000 - 56 + 1
    assert list(index.columns) == ["i", "shift", "time"]
    assert index["time"].iloc[0] == pytest.approx(27.5)
    assert run_cli("detect", out, "-A", "200", "--alpha", "1e-11", "-o", tmp_path / "r.json") == 0


# ----------------------------
# score
# ----------------------------
def write_result(path, n, cps, levels):
    path.write_text(json.dumps({
        "schema": 1, "n": n, "method": "fdpv", "params": {}, "change_points": cps,
        "pvalues": [0.0] * len(cps), "levels": levels, "runtime_seconds": 0.0,
    }))


def write_truth(path, n, cps, levels):
    path.write_text(json.dumps({"schema": 1, "kind": "mean", "n": n, "boundaries": cps, "levels": levels}))


def test_score_exact(tmp_path, capsys):
    write_result(tmp_path / "r.json", 5000, [2500], [0.0, 1.0])
    write_truth(tmp_path / "t.json", 5000, [2500], [0.0, 1.0])
    assert run_cli("score", tmp_path / "r.json", tmp_path / "t.json") == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {"k_hat": 1, "correct_k": True, "mise": 0.0, "secp_normalized": 0.0, "secp_raw": 0.0}


def test_score_off_by_fifty(tmp_path, capsys):
    write_result(tmp_path / "r.json", 5000, [2550], [0.0, 1.0])
    write_truth(tmp_path / "t.json", 5000, [2500], [0.0, 1.0])
    assert run_cli("score", tmp_path / "r.json", tmp_path / "t.json") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["secp_normalized"] == pytest.approx(1e-4)
    assert out["secp_raw"] == pytest.approx(2500.0)
    assert out["mise"] == pytest.approx(50 / 5000)


def test_score_wrong_count(tmp_path, capsys):
    write_result(tmp_path / "r.json", 100, [20, 50], [0.0, 0.0, 1.0])
    write_truth(tmp_path / "t.json", 100, [50], [0.0, 1.0])
    assert run_cli("score", tmp_path / "r.json", tmp_path / "t.json") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["correct_k"] is False
    assert out["secp_normalized"] is None and out["secp_raw"] is None


def test_score_bad_files_exit_3(tmp_path):
    write_truth(tmp_path / "t.json", 100, [50], [0.0, 1.0])
    (tmp_path / "r.json").write_text("{not json")
    assert run_cli("score", tmp_path / "r.json", tmp_path / "t.json") == 3
    write_result(tmp_path / "r.json", 200, [50], [0.0, 1.0])
    assert run_cli("score", tmp_path / "r.json", tmp_path / "t.json") == 3
    write_result(tmp_path / "r.json", 100, [50, 20], [0.0, 1.0, 2.0])
    assert run_cli("score", tmp_path / "r.json", tmp_path / "t.json") == 3


def test_simulate_detect_score_pipeline(tmp_path, capsys):
    series, result = tmp_path / "x.txt", tmp_path / "r.json"
    assert run_cli("simulate", "mean", "-n", "1000", "--sigma", "0", "-o", series) == 0
    assert run_cli("detect", series, "--method", "plsc", "-o", result) == 0
    capsys.readouterr()
    assert run_cli("score", result, tmp_path / "x.txt.truth.json") == 0
    out = json.loads(capsys.readouterr().out)
    assert out["correct_k"] is True and out["mise"] == 0.0 and out["secp_normalized"] == 0.0


# ----------------------------
# bench
# ----------------------------
def test_bench_smoke(tmp_path):
    out = tmp_path / "report.json"
    assert run_cli("bench", "-n", "1000", "-m", "5", "-A", "50", "--seed", "1", "-o", out) == 0
    data = json.loads(out.read_text())
    assert data["schema"] == 1
    for method in ("fdpv", "plsc"):
        assert sum(data["reports"][method]["k_histogram"].values()) == 5
    assert data["config"]["fdpv"]["window"] == 50


def test_bench_sweep_rows(tmp_path):
    out = tmp_path / "report.json"
    assert run_cli("bench", "--no-monte-carlo", "-A", "50", "--sweep", "1000,2000,4000",
                   "--repeats", "1", "-o", out) == 0
    table = pd.read_csv(tmp_path / "report.json.sweep.csv")
    assert len(table) == 6
    assert json.loads(out.read_text())["reports"] == {}


def test_bench_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 800, "m": 2, "methods": ["fdpv"], "fdpv": {"window": 40}}))
    out = tmp_path / "report.json"
    assert run_cli("bench", "--config", cfg, "-m", "3", "-o", out) == 0
    data = json.loads(out.read_text())
    assert data["config"]["n"] == 800 and data["config"]["m"] == 3
    assert list(data["reports"]) == ["fdpv"]


def test_bench_bad_config_exit_codes(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 800, "unknown": 1}))
    assert run_cli("bench", "--config", cfg, "-o", tmp_path / "r.json") == 2
    assert run_cli("bench", "--config", tmp_path / "missing.json", "-o", tmp_path / "r.json") == 3
    assert run_cli("bench", "--sweep", "4000,1000", "-o", tmp_path / "r.json") == 2
    assert run_cli("bench", "--methods", "fdpv,cusum", "-o", tmp_path / "r.json") == 2


# ----------------------------
# Determinism
# ----------------------------
def test_commands_are_deterministic(tmp_path):
    outputs = []
    for run in ("a", "b"):
        d = tmp_path / run
        d.mkdir()
        assert run_cli("simulate", "mean", "-n", "800", "--seed", "5", "-o", d / "x.txt") == 0
        assert run_cli("detect", d / "x.txt", "-A", "40", "-o", d / "fdpv.json", "--emit-hat", d / "hat.csv") == 0
        assert run_cli("detect", d / "x.txt", "--method", "plsc", "-o", d / "plsc.json") == 0
        assert run_cli("simulate", "hurst", "-n", "2000", "--seed", "5", "-o", d / "fbm.txt") == 0
        assert run_cli("wavelet", d / "fbm.txt", "-o", d / "y.txt") == 0
        assert run_cli("bench", "-n", "600", "-m", "2", "-A", "30", "--seed", "5", "-o", d / "bench.json") == 0
        outputs.append(d)
    a, b = outputs
    for name in ("x.txt", "x.txt.truth.json", "hat.csv", "fbm.txt", "y.txt", "y.txt.index.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    for name in ("fdpv.json", "plsc.json", "bench.json"):
        assert without_timing(a / name) == without_timing(b / name), name
