# src/fdpv_changepoint/core/errors.py
from __future__ import annotations


class ChangePointError(Exception):
    """Base class for every error raised by fdpv_changepoint."""


class InvalidParameterError(ChangePointError, ValueError):
    """A parameter object or spec violates its invariants."""


# ---- series validation ------------------------------------------------------
class InvalidSeriesError(ChangePointError, ValueError):
    pass


class EmptySeriesError(InvalidSeriesError):
    pass


class NonFiniteError(InvalidSeriesError):
    pass


class BadSigmaError(InvalidSeriesError):
    pass


class BoundaryOutOfRangeError(InvalidParameterError):
    pass


# ---- detectors ---------------------------------------------------------------
class WindowTooLargeError(ChangePointError, ValueError):
    pass


class IndexOutOfRangeError(ChangePointError, IndexError):
    pass


# ---- simulation / wavelets ---------------------------------------------------
class EmbeddingFailureError(ChangePointError, RuntimeError):
    pass


class UnsupportedWaveletError(ChangePointError, ValueError):
    pass


class ScaleTooLargeError(ChangePointError, ValueError):
    pass


class AllDegenerateError(ChangePointError, ValueError):
    pass


class QuadratureFailureError(ChangePointError, RuntimeError):
    pass


# ---- metrics -----------------------------------------------------------------
class LengthMismatchError(ChangePointError, ValueError):
    pass


class CountMismatchError(ChangePointError, ValueError):
    pass


# ---- files -------------------------------------------------------------------
class SeriesFileError(ChangePointError, ValueError):
    """A series or result file does not follow its documented format."""
