"""Level-set intervals of sampled curves."""
from __future__ import annotations

import numpy as np


def _cross(x0, x1, y0, y1, level):
    if y1 == y0:
        return x0
    return x0 + (level - y0) * (x1 - x0) / (y1 - y0)


def intervals_where(x, y, level: float, above: bool = True) -> list[tuple[float, float]]:
    """Maximal intervals where ``y >= level`` (or ``y <= level`` when ``above`` is
    false). Edges are linearly interpolated between the bracketing samples; a
    run touching the end of the grid stops at the last sample."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) == 0:
        raise ValueError("x and y must be 1-D arrays of equal nonzero length")
    mask = y >= level if above else y <= level
    out = []
    i, n = 0, len(x)
    while i < n:
        if not mask[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and mask[j + 1]:
            j += 1
        lo = x[i] if i == 0 else _cross(x[i - 1], x[i], y[i - 1], y[i], level)
        hi = x[j] if j == n - 1 else _cross(x[j], x[j + 1], y[j], y[j + 1], level)
        out.append((float(lo), float(hi)))
        i = j + 1
    return out


def total_width(intervals) -> float:
    return float(sum(hi - lo for lo, hi in intervals))
