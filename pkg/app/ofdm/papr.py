from typing import Sequence

import numpy as np

from app.core import Tensor
from app.errors import EmptySampleError, UndefinedPaprError
from app.models.results import MetricCurve
from app.models.signals import PaprSample


def papr(x: Tensor) -> Tensor:
    """max |x(n)|^2 / mean |x(n)|^2 over the last axis, linear, differentiable."""
    power = x * x
    mean = power.mean(axis=-1)
    if np.any(mean.data == 0.0):
        raise UndefinedPaprError("PAPR is undefined for an all-zero signal")
    return power.max(axis=-1) / mean


def papr_linear(x: np.ndarray) -> np.ndarray:
    """Non-differentiable PAPR over the last axis for evaluation paths."""
    power = np.asarray(x, dtype=np.float64) ** 2
    mean = power.mean(axis=-1)
    if np.any(mean == 0.0):
        raise UndefinedPaprError("PAPR is undefined for an all-zero signal")
    return power.max(axis=-1) / mean


def papr_db(x: np.ndarray) -> np.ndarray:
    return 10.0 * np.log10(papr_linear(x))


def papr_sample(x: np.ndarray) -> PaprSample:
    return PaprSample.from_linear(float(papr_linear(np.asarray(x).reshape(-1))))


def ccdf(
    paprs_db: Sequence[float],
    thresholds_db: Sequence[float],
    label: str = "ccdf",
    seed: int = 0,
) -> MetricCurve:
    """Pr(PAPR >= PAPR0) for each threshold, as exact count ratios."""
    samples = np.asarray(paprs_db, dtype=np.float64).reshape(-1)
    if samples.size == 0:
        raise EmptySampleError("CCDF needs at least one PAPR sample")
    n = int(samples.size)
    counts = [int(np.count_nonzero(samples >= t)) for t in thresholds_db]
    return MetricCurve(
        label=label,
        kind="ccdf",
        x=[float(t) for t in thresholds_db],
        y=[c / n for c in counts],
        n_samples=[n] * len(counts),
        seed=seed,
    )
