# tests/test_smoke.py
import numpy as np

from fdpv_changepoint.core.types import TimeSeries


def test_imports():
    import fdpv_changepoint  # noqa: F401
    from fdpv_changepoint import get_detector  # noqa: F401
    assert callable(get_detector)


def test_fdpv_end_to_end(step_series):
    from fdpv_changepoint import get_detector

    det = get_detector("fdpv", window=10)
    seg = det.detect(step_series)
    assert seg.change_points == (50,)
    assert seg.levels == (0.0, 1.0)
    assert det.last_runtime is not None and det.last_runtime >= 0.0


def test_plsc_end_to_end(step_series):
    from fdpv_changepoint import get_detector

    det = get_detector("plsc", penalty=1.0)
    seg = det.detect(step_series)
    assert seg.change_points == (50,)
    assert seg.pvalues is None


def test_constant_series_has_no_change():
    from fdpv_changepoint import get_detector

    x = TimeSeries(np.full(200, 3.0))
    assert get_detector("fdpv", window=20).detect(x).k == 0
    assert get_detector("plsc").detect(x).k == 0
