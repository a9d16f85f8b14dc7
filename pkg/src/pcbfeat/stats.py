"""Order statistics shared by the feature extractors and the report stage.

The median of an even-count sample is pinned to the lower-middle element,
so a median is always an element of its sample. Tukey hinges are medians
of the values strictly below/above the overall median; an empty strict
half collapses its hinge onto the median.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EmptyGroupError


def lower_median(values, axis=None):
    """Median as the lower-middle order statistic (element of the sample)."""
    values = np.asarray(values)
    if axis is None:
        values = values.ravel()
        axis = 0
    n = values.shape[axis]
    if n == 0:
        raise EmptyGroupError("median of an empty sample")
    k = (n - 1) // 2
    return np.take(np.partition(values, k, axis=axis), k, axis=axis)


@dataclass(frozen=True)
class QuartileSummary:
    """Five-number summary with Tukey hinges for one aggregation group."""

    key: object
    minimum: float
    lower_hinge: float
    median: float
    upper_hinge: float
    maximum: float
    n: int

    def as_dict(self):
        return {
            "min": self.minimum,
            "lower_hinge": self.lower_hinge,
            "median": self.median,
            "upper_hinge": self.upper_hinge,
            "max": self.maximum,
            "n": self.n,
        }


def tukey_quartiles(values, key=None):
    """Five-number summary of a non-empty sample of finite values."""
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise EmptyGroupError("cannot summarize an empty group")
    if not np.isfinite(values).all():
        raise EmptyGroupError("group contains non-finite values")
    med = float(lower_median(values))
    lower = values[values < med]
    upper = values[values > med]
    lo = float(lower_median(lower)) if lower.size else med
    hi = float(lower_median(upper)) if upper.size else med
    return QuartileSummary(
        key=key,
        minimum=float(values.min()),
        lower_hinge=lo,
        median=med,
        upper_hinge=hi,
        maximum=float(values.max()),
        n=int(values.size),
    )
