# src/fdpv_changepoint/core/factory.py
from __future__ import annotations

from typing import Any, Literal

from ..engines.fdpv_detector import FdpvDetector
from ..engines.plsc_detector import PlscDetector
from .base_detector import ChangePointDetector
from .types import FdpvParams, PlscParams

MethodName = Literal["fdpv", "plsc"]


def _need(kwargs: dict[str, Any], *names: str) -> list[Any]:
    """
    Extract required keyword arguments, raising a clear KeyError when missing.

    Parameters
    ----------
    kwargs : dict[str, Any]
        The keyword args passed into the factory.
    names : str
        Required parameter names.

    Returns
    -------
    list[Any]
        Values corresponding to the required names, in order.

    Raises
    ------
    KeyError
        If any required parameter is missing, a message listing all missing keys
        is raised.
    """
    try:
        return [kwargs[n] for n in names]
    except KeyError as e:
        missing = ", ".join(n for n in names if n not in kwargs)
        raise KeyError(f"Missing required argument(s): {missing}") from e


def get_detector(method: MethodName, **kwargs: Any) -> ChangePointDetector:
    """
    Factory: return a concrete ChangePointDetector for the requested method.

    Parameters
    ----------
    method : MethodName
        One of: "fdpv", "plsc".
    **kwargs : Any
        Method-specific arguments (see below).

    Required kwargs by method
    -------------------------
    - fdpv:
        window (int),
        optional: kmax (int, default=10), alpha (float, default=1e-4),
        min_gap (int, default=window), use_known_sigma (bool, default=True)
    - plsc:
        optional: penalty (float|None, default=None -> choose_penalty),
        kmax (int, default=10), memory_mode ("lean"|"full-matrix", default="lean"),
        max_matrix_bytes (int, default=2 GiB)

    Returns
    -------
    ChangePointDetector
        A ready-to-run detector instance.

    Raises
    ------
    KeyError
        If required parameters are missing.
    ValueError
        If the method is not supported or a parameter is invalid.
    """
    m = method.lower()

    # ---- Filtered derivative with p-value ---------------------------------
    if m == "fdpv":
        (window,) = _need(kwargs, "window")
        min_gap = kwargs.get("min_gap")
        params = FdpvParams(
            window=int(window),
            kmax=int(kwargs.get("kmax", 10)),
            alpha_critic=float(kwargs.get("alpha", 1e-4)),
            min_gap=None if min_gap is None else int(min_gap),
            use_known_sigma=bool(kwargs.get("use_known_sigma", True)),
        )
        return FdpvDetector(params)

    # ---- Penalized least squares -------------------------------------------
    if m == "plsc":
        penalty = kwargs.get("penalty")
        params = PlscParams(
            penalty=None if penalty is None else float(penalty),
            kmax=int(kwargs.get("kmax", 10)),
            memory_mode=kwargs.get("memory_mode", "lean"),
            max_matrix_bytes=int(kwargs.get("max_matrix_bytes", 2 * 1024**3)),
        )
        return PlscDetector(params)

    # -----------------------------------------------------------------------
    raise ValueError(f"Unsupported method: {method!r}")
