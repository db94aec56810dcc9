"""Evaluation metrics: approximation error, angular error, and summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "approximation_error_db",
    "angular_error_deg",
    "ErrorSummary",
    "summarize",
    "APPROX_ERROR_FLOOR_DB",
]

#: reported instead of -inf when the approximation is numerically exact
APPROX_ERROR_FLOOR_DB = -300.0


def approximation_error_db(reference, approximate) -> float:
    """Relative energy of the map error, in dB.

    ``10 log10( sum (ref - approx)^2 / sum ref^2 )``.  Accepts SRP maps or
    plain arrays.  A perfect reconstruction returns the floor value rather
    than ``-inf``; an all-zero reference is rejected because the ratio is
    undefined.
    """
    ref = np.asarray(getattr(reference, "values", reference), dtype=float)
    app = np.asarray(getattr(approximate, "values", approximate), dtype=float)
    if ref.shape != app.shape:
        raise ValueError(f"map sizes differ: {ref.shape} vs {app.shape}")
    err = ref - app
    denom = float(np.sum(ref**2))
    if denom == 0.0:
        raise ValueError("reference map is identically zero")
    num = float(np.sum(err**2))
    if num == 0.0:
        return APPROX_ERROR_FLOOR_DB
    return max(APPROX_ERROR_FLOOR_DB, 10.0 * math.log10(num / denom))


def angular_error_deg(direction_a, direction_b) -> float:
    """Great-circle angle between two directions, degrees in [0, 180].

    Inputs need not be normalized; zero vectors are rejected.  The cosine is
    clamped to [-1, 1] so antipodal or identical directions cannot produce
    NaN from rounding.
    """
    a = np.asarray(direction_a, dtype=float)
    b = np.asarray(direction_b, dtype=float)
    if a.shape != (3,) or b.shape != (3,):
        raise ValueError("directions must be 3-vectors")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("directions must be nonzero")
    cosine = float(a @ b) / (na * nb)
    return math.degrees(math.acos(min(1.0, max(-1.0, cosine))))


@dataclass(frozen=True)
class ErrorSummary:
    """Median and quartiles of a sample, linear-interpolation convention."""

    count: int
    median: float
    q1: float
    q3: float
    mean: float

    def as_dict(self) -> dict:
        return {
            "count": self.count,
            "median": self.median,
            "q1": self.q1,
            "q3": self.q3,
            "mean": self.mean,
        }


def summarize(values) -> ErrorSummary:
    """Summary statistics of a non-empty, finite sample."""
    x = np.asarray(values, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("cannot summarize an empty sample")
    if not np.all(np.isfinite(x)):
        raise ValueError("sample contains non-finite values")
    q1, med, q3 = np.percentile(x, [25.0, 50.0, 75.0])
    return ErrorSummary(
        count=int(x.size),
        median=float(med),
        q1=float(q1),
        q3=float(q3),
        mean=float(np.mean(x)),
    )
