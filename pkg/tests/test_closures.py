from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from decaylaw.closures import (K_CAP, brute_force_cl_step, cl_k, cl_km, cl_km_trace, cl_step, cl_step_traced,
                               connected_sets, rcl_k, scl_k)
from decaylaw.errors import CapExceeded, InvalidInput
from decaylaw.sampler import sample_model
from decaylaw.structures import Structure

from strategies import plain_structures


def cascade(n: int = 7) -> Structure:
    """3 is a common neighbour of 1 and 2; each later vertex sees the two before it."""
    edges = [(1, 3), (2, 3)] + [(k - 1, k) for k in range(4, n + 1)] + [(k - 2, k) for k in range(4, n + 1)]
    return Structure(n, edges)


def test_cl_step_all_vertices():
    M = cascade()
    assert cl_step(set(M.vertices), M, 3) == frozenset(M.vertices)


def test_common_neighbour_added():
    M = Structure(4, [(1, 3), (2, 3), (3, 4)])
    assert cl_step({1, 2}, M, 3) == frozenset({1, 2, 3})
    _, wit, _ = cl_step_traced({1, 2}, M, 3)
    assert wit == {3: frozenset({1, 2, 3})}


def test_m_zero_is_identity():
    M = cascade()
    assert cl_km({1, 2}, M, 3, 0) == frozenset({1, 2})


def test_cascade_stages():
    M = cascade()
    trace = cl_km_trace({1, 2}, M, 3, None)
    assert [sorted(s) for s in trace.stages] == [[1, 2], [1, 2, 3, 4], [1, 2, 3, 4, 5, 6], list(range(1, 8))]
    cur = frozenset({1, 2})
    for stage in trace.stages[1:]:
        cur = cl_step(cur, M, 3)
        assert cur == stage == brute_force_cl_step(trace.stages[trace.stages.index(stage) - 1], M, 3)
    assert cl_k({1, 2}, M, 3) == frozenset(range(1, 8))
    assert [sorted(s) for s in cl_km_trace({1, 2}, M, 4, None).stages] == [[1, 2], [1, 2, 3, 4, 5], list(range(1, 8))]
    assert cl_k({1, 2}, M, 2) == frozenset({1, 2})


def test_trace_json():
    out = cl_km_trace({1, 2}, Structure(3, [(1, 3), (2, 3)]), 3, None).to_json()
    assert out["stages"] == [[1, 2], [1, 2, 3]] and out["witnesses"] == {"3": [1, 2, 3]}


def test_empty_set_is_closed_on_samples():
    for seed in range(3):
        M = sample_model("m0", 60, seed)
        for k in (2, 3, 4):
            assert cl_k(set(), M, k) == frozenset()


def test_caps():
    with pytest.raises(CapExceeded):
        cl_step(set(), cascade(), K_CAP + 1)
    with pytest.raises(InvalidInput):
        cl_km(set(), cascade(), 2, -1)
    with pytest.raises(InvalidInput):
        brute_force_cl_step(set(), Structure(2, [], []), 2)


def test_connected_sets_unique():
    M = cascade(6)
    got = list(connected_sets(M, 1, 3, lambda u: u > 1))
    assert len(got) == len(set(got))
    assert (1,) in got and all(1 in c for c in got)


CHAIN = Structure(5, [], [(1, 2), (2, 3), (3, 4), (4, 5)])


def test_successor_closures():
    assert rcl_k({3}, CHAIN, 1) == frozenset({2, 3, 4})
    assert scl_k({3}, CHAIN, 1) == frozenset({2, 3, 4})
    assert scl_k({3}, CHAIN) == frozenset(range(1, 6))
    lone = Structure(4, [], [(1, 2)])
    assert scl_k({3, 4}, lone) == frozenset({3, 4})
    with pytest.raises(InvalidInput):
        rcl_k({1}, cascade(), 1)


@given(plain_structures(min_size=2, max_size=8), st.data())
def test_cl_step_matches_brute_force(M, data):
    X = data.draw(st.sets(st.sampled_from(list(M.vertices)), max_size=3))
    k = data.draw(st.integers(2, 4))
    assert cl_step(X, M, k) == brute_force_cl_step(X, M, k)


@given(plain_structures(min_size=2, max_size=7), st.data())
def test_closure_is_extensive_and_monotone_in_k(M, data):
    X = data.draw(st.sets(st.sampled_from(list(M.vertices)), max_size=3))
    c2 = cl_k(X, M, 2)
    c3 = cl_k(X, M, 3)
    assert frozenset(X) <= c2 <= c3
    assert cl_k(c3, M, 3) == c3
