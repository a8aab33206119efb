"""Power-law exponent fits on ``(n, value)`` series."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.stats import linregress

from ..errors import InvalidInput


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr: float
    residual: float
    points: tuple[tuple[int, float], ...]
    excluded: tuple[int, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr": self.stderr,
            "residual": self.residual,
            "points": [[n, v] for n, v in self.points],
            "excluded_zero_levels": list(self.excluded),
        }


def level_means(rows: Iterable[tuple[int, float]], reducer: str = "mean") -> dict[int, float]:
    groups: dict[int, list[float]] = defaultdict(list)
    for n, v in rows:
        groups[int(n)].append(float(v))
    if reducer == "mean":
        return {n: math.fsum(vs) / len(vs) for n, vs in sorted(groups.items())}
    if reducer == "max":
        return {n: max(vs) for n, vs in sorted(groups.items())}
    raise InvalidInput(f"unknown reducer {reducer!r}")


def fit_exponent(rows: Iterable[tuple[int, float]], reducer: str = "mean") -> FitResult:
    """Least squares of ``log value`` on ``log n`` over per-``n`` means (or maxima).

    Levels whose reduced value is zero are left out and listed in ``excluded``.
    """
    means = level_means(rows, reducer)
    pts = [(n, v) for n, v in means.items() if v > 0]
    excluded = tuple(n for n, v in means.items() if v <= 0)
    if len(pts) < 3:
        raise InvalidInput(f"need at least 3 n-levels with positive values, got {len(pts)}")
    x = np.log([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    res = linregress(x, y)
    fitted = res.intercept + res.slope * x
    resid = float(np.sqrt(np.mean((y - fitted) ** 2)))
    return FitResult(float(res.slope), float(res.intercept), float(res.stderr), resid, tuple(pts), excluded)
