"""First- and second-order pixel statistics.

Means and covariances use the population convention (divide by N), computed
in two passes: channel means first, then centered second moments. All
reductions go through numpy's pairwise summation, whose order is fixed by
the array layout, so results are byte-identical no matter how many threads
the surrounding process uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyImageError
from .imgio import FloatImage


@dataclass(frozen=True, eq=False)
class ColorStats:
    """Per-channel mean (3,), pixel covariance (3, 3) and pixel count."""

    mean: np.ndarray
    cov: np.ndarray
    n: int


def compute_color_stats(img: FloatImage) -> ColorStats:
    """Population mean and covariance of an image's RGB samples."""
    flat = img.planes.reshape(3, -1)
    n = flat.shape[1]
    if n == 0:
        raise EmptyImageError("cannot compute statistics of an empty image")
    mean = np.array([float(flat[c].sum()) / n for c in range(3)], dtype=np.float64)
    centered = flat - mean[:, None]
    cov = np.empty((3, 3), dtype=np.float64)
    for i in range(3):
        for j in range(i, 3):
            cov[i, j] = cov[j, i] = float((centered[i] * centered[j]).sum()) / n
    return ColorStats(mean=mean, cov=cov, n=n)


def compute_scalar_stats(plane: np.ndarray) -> tuple[float, float]:
    """Population mean and standard deviation of a scalar plane."""
    p = np.asarray(plane, dtype=np.float64)
    n = p.size
    if n == 0:
        raise EmptyImageError("cannot compute statistics of an empty plane")
    mean = float(p.sum()) / n
    var = float(((p - mean) ** 2).sum()) / n
    return mean, math.sqrt(var)


def stats_to_dict(stats: ColorStats) -> dict:
    """JSON-ready form used by the run report."""
    return {
        "mean": [float(x) for x in stats.mean],
        "cov": [[float(x) for x in row] for row in stats.cov],
        "pixels": int(stats.n),
    }
