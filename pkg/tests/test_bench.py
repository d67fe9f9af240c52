# tests/test_bench.py
import pytest

from fdpv_changepoint.core.errors import InvalidParameterError
from fdpv_changepoint.core.types import FdpvParams, PiecewiseSpec, PlscParams
from fdpv_changepoint.evaluation.bench import (
    SWEEP_COLUMNS,
    BenchConfig,
    make_detector,
    run_complexity_sweep,
    run_monte_carlo,
)


def statistics_only(reports):
    return {m: {k: v for k, v in r.to_dict().items() if k != "runtimes"} for m, r in reports.items()}


@pytest.mark.parametrize(
    "kwargs",
    [
        {"m": 0},
        {"sigma": -1.0},
        {"methods": ("fdpv", "cusum")},
        {"methods": ()},
        {"sweep": (2000, 1000)},
        {"sweep": (1000, 1000)},
        {"sweep_repeats": 0},
        {"n": 100, "spec": PiecewiseSpec((100,), (0.0, 1.0))},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(InvalidParameterError):
        BenchConfig(**kwargs)


def test_config_dict_round_trip():
    cfg = BenchConfig(
        n=1000,
        m=3,
        spec=PiecewiseSpec((300, 700), (0.0, 1.0, 0.0)),
        fdpv=FdpvParams(window=50, alpha_critic=1e-3),
        plsc=PlscParams(penalty=12.0),
        sweep=(500, 1000),
    )
    assert BenchConfig.from_dict(cfg.to_dict()) == cfg
    with pytest.raises(InvalidParameterError):
        BenchConfig.from_dict({"n": 10, "colour": "blue"})


def test_spec_is_rescaled_for_sweep_sizes():
    cfg = BenchConfig(n=1000, spec=PiecewiseSpec((250, 500), (0.0, 1.0, 2.0)))
    assert cfg.spec_for(1000).boundaries == (250, 500)
    assert cfg.spec_for(4000).boundaries == (1000, 2000)
    assert BenchConfig().spec_for(5000).k == 5


def test_make_detector_goes_through_factory():
    cfg = BenchConfig(
        fdpv=FdpvParams(window=120, kmax=4, alpha_critic=1e-3, min_gap=60, use_known_sigma=False),
        plsc=PlscParams(penalty=7.5, kmax=3, memory_mode="full-matrix", max_matrix_bytes=10**6),
    )
    assert make_detector("fdpv", cfg).params == cfg.fdpv
    assert make_detector("plsc", cfg).params == cfg.plsc
    assert make_detector("fdpv", BenchConfig()).params.window == 300
    assert make_detector("plsc", BenchConfig()).params.memory_mode == "lean"
    with pytest.raises(ValueError):
        make_detector("cusum", cfg)


def test_noiseless_single_replication_is_exact():
    cfg = BenchConfig(n=1000, m=1, sigma=0.0, fdpv=FdpvParams(window=50))
    reports = run_monte_carlo(cfg)
    for method in ("fdpv", "plsc"):
        r = reports[method]
        assert r.correct_k_fraction == 1.0
        assert r.mise == 0.0
        assert r.secp == 0.0
        assert r.failures == []


def test_monte_carlo_is_deterministic_and_method_independent():
    cfg = BenchConfig(n=600, m=4, fdpv=FdpvParams(window=30), plsc=PlscParams(kmax=6))
    both = run_monte_carlo(cfg)
    again = run_monte_carlo(cfg)
    alone = run_monte_carlo(BenchConfig(n=600, m=4, fdpv=FdpvParams(window=30), methods=("fdpv",)))
    assert statistics_only(both) == statistics_only(again)
    assert statistics_only(alone)["fdpv"] == statistics_only(both)["fdpv"]
    assert sum(both["plsc"].k_histogram.values()) == 4


def test_monte_carlo_parallel_matches_sequential():
    cfg = BenchConfig(n=600, m=4, fdpv=FdpvParams(window=30), methods=("fdpv",))
    assert statistics_only(run_monte_carlo(cfg)) == statistics_only(run_monte_carlo(cfg.with_overrides(jobs=2)))


def test_complexity_sweep_table():
    cfg = BenchConfig(n=1000, fdpv=FdpvParams(window=50), sweep=(500, 1000), sweep_repeats=1)
    table = run_complexity_sweep(cfg)
    assert list(table.columns) == SWEEP_COLUMNS
    assert len(table) == 4
    assert set(table["status"]) == {"ok"}
    assert (table["wall_time"] > 0).all()


def test_complexity_sweep_records_infeasible_sizes():
    cfg = BenchConfig(
        n=1000,
        fdpv=FdpvParams(window=200),
        plsc=PlscParams(memory_mode="full-matrix", max_matrix_bytes=300 * 300 * 8),
        sweep=(300, 600),
        sweep_repeats=1,
    )
    table = run_complexity_sweep(cfg).set_index(["n", "method"])
    assert table.loc[(300, "plsc"), "status"] == "ok"
    assert table.loc[(600, "plsc"), "status"].startswith("infeasible")
    assert table.loc[(300, "fdpv"), "status"].startswith("error: WindowTooLargeError")
    assert table.loc[(600, "plsc"), "peak_memory"] == 0


def test_complexity_sweep_records_unusable_sizes():
    cfg = BenchConfig(
        n=1000,
        spec=PiecewiseSpec((400, 410), (0.0, 1.0, 0.0)),
        methods=("plsc",),
        sweep=(10, 1000),
        sweep_repeats=1,
    )
    table = run_complexity_sweep(cfg).set_index(["n", "method"])
    assert len(table) == 2
    assert table.loc[(10, "plsc"), "status"].startswith("error: InvalidParameterError")
    assert table.loc[(10, "plsc"), "peak_memory"] == 0
    assert table.loc[(1000, "plsc"), "status"] == "ok"


def test_complexity_sweep_requires_sizes():
    with pytest.raises(InvalidParameterError):
        run_complexity_sweep(BenchConfig())
