from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from decaylaw.errors import InvalidInput
from decaylaw.experiments.fit import fit_exponent, level_means
from decaylaw.sampler import SampleConfig, class_probabilities

GRID = (1000, 2000, 4000, 8000, 16000)


def test_synthetic_power_law():
    fit = fit_exponent([(n, 3.7 * n ** 0.3) for n in GRID])
    assert fit.slope == pytest.approx(0.3, abs=1e-9)
    assert fit.intercept == pytest.approx(math.log(3.7), abs=1e-9)
    assert fit.residual < 1e-9


def test_reducers_and_exclusions():
    rows = [(10, 1.0), (10, 3.0), (20, 4.0), (40, 8.0), (80, 0.0)]
    assert level_means(rows) == {10: 2.0, 20: 4.0, 40: 8.0, 80: 0.0}
    assert level_means(rows, "max")[10] == 3.0
    fit = fit_exponent(rows)
    assert fit.excluded == (80,) and fit.slope == pytest.approx(1.0)
    with pytest.raises(InvalidInput):
        fit_exponent(rows[:3])
    with pytest.raises(InvalidInput):
        level_means(rows, "median")


def _mid_degree(n: int) -> float:
    """Expected degree of the middle vertex of an m0 host."""
    p = class_probabilities(SampleConfig("m0", n))
    v = n // 2
    return float(p[1:v].sum() + p[1:n - v + 1].sum())


def test_degree_series_slope():
    fit = fit_exponent([(n, _mid_degree(n)) for n in GRID])
    assert fit.slope == pytest.approx(0.3, abs=0.05)


def test_path2_series_slope():
    # expected positive-mode 2-paths from a uniform base vertex: (sum_y D_y^2 - sum_y sum_z p_yz^2) / n
    pts = []
    for n in GRID:
        p = class_probabilities(SampleConfig("m0", n))
        idx = np.arange(1, n + 1)
        diff = np.abs(idx[:, None] - idx[None, :]) if n <= 4000 else None
        if diff is not None:
            P = p[diff]
            np.fill_diagonal(P, 0.0)
            D = P.sum(axis=1)
            val = (np.sum(D ** 2) - np.sum(P ** 2)) / n
        else:
            cs = np.concatenate([[0.0], np.cumsum(p[1:])])
            D = cs[idx - 1] + cs[n - idx]
            cs2 = np.concatenate([[0.0], np.cumsum(p[1:] ** 2)])
            val = (np.sum(D ** 2) - np.sum(cs2[idx - 1] + cs2[n - idx])) / n
        pts.append((n, val))
    assert fit_exponent(pts).slope == pytest.approx(0.6, abs=0.1)


@given(st.floats(-2, 2), st.floats(0.1, 100))
def test_exact_power_laws(slope, c):
    fit = fit_exponent([(n, c * n ** slope) for n in GRID])
    assert fit.slope == pytest.approx(slope, abs=1e-8)
