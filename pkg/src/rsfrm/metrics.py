"""Error metrics and fold summaries."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import LengthMismatch


class Metric(str, enum.Enum):
    RMSE = "RMSE"
    MSE = "MSE"
    HALF_MSE = "HalfMSE"


def _residuals(actual, predicted) -> np.ndarray:
    a = np.asarray(actual, dtype=np.float64).ravel()
    p = np.asarray(predicted, dtype=np.float64).ravel()
    if a.shape != p.shape:
        raise LengthMismatch(f"{a.size} actual values vs {p.size} predictions")
    if a.size == 0:
        raise LengthMismatch("need at least one value")
    return a - p


def mse(actual, predicted) -> float:
    r = _residuals(actual, predicted)
    return float(np.mean(r * r))


def rmse(actual, predicted) -> float:
    return float(np.sqrt(mse(actual, predicted)))


def half_mse(actual, predicted) -> float:
    """``MSE / 2``, the index used for the synthetic and CA benchmarks."""
    return 0.5 * mse(actual, predicted)


_FUNCS = {Metric.RMSE: rmse, Metric.MSE: mse, Metric.HALF_MSE: half_mse}


def evaluate(metric: Metric | str, actual, predicted) -> float:
    return _FUNCS[Metric(metric)](actual, predicted)


@dataclass(frozen=True)
class ErrorSummary:
    """Mean and sample standard deviation (divisor ``k - 1``) over folds.

    ``std_defined`` is False for a single value, in which case ``std`` is 0.
    """

    metric: Metric
    per_fold: tuple
    mean: float
    std: float
    std_defined: bool = True


def summarize(values, metric: Metric | str) -> ErrorSummary:
    vals = tuple(float(v) for v in values)
    if not vals:
        raise ValueError("cannot summarize zero values")
    # fsum is exactly rounded, so the summary does not depend on fold order.
    mean = math.fsum(vals) / len(vals)
    if len(vals) < 2:
        return ErrorSummary(Metric(metric), vals, mean, 0.0, std_defined=False)
    var = math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
    return ErrorSummary(Metric(metric), vals, mean, math.sqrt(var))
