from __future__ import annotations

import pytest

from decaylaw.errors import PreconditionError
from decaylaw.experiments.witness import check_witness_preconditions, free_extension_witness, witness_clauses
from decaylaw.patterns import BUILTIN
from decaylaw.sampler import sample_model
from decaylaw.structures import Pair, Structure
from decaylaw.weights import DEFAULT_ALPHA


def k4_host() -> Structure:
    """Vertex 1 sits in a K4 that the t=4 closure swallows; 5..12 form a path."""
    edges = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)] + [(k, k + 1) for k in range(5, 12)]
    return Structure(12, edges)


def test_trivial_pattern_is_its_own_witness():
    same = Pair(Structure(1, []), frozenset({1}))
    res = free_extension_witness(k4_host(), {1: 5}, same, 2, 4)
    assert res.found and res.g == {1: 5}
    assert all(witness_clauses(k4_host(), {1: 5}, res.g, 2, 4).values())


def test_clause_i_rejection():
    res = free_extension_witness(k4_host(), {1: 1}, BUILTIN["pendant"], 2, 4)
    assert not res.found
    assert res.examined == 3
    assert res.rejected == {"i": 3, "ii": 0, "iii": 0}
    assert res.closure_t_size == 4


def test_witness_on_sample_reverifies():
    M = sample_model("m0", 1500, 11)
    f = {1: 700}
    res = free_extension_witness(M, f, BUILTIN["pendant"], 2, 4)
    assert res.found
    assert set(res.g) == {1, 2} and res.g[1] == 700
    assert witness_clauses(M, f, res.g, 2, 4) == {"i": True, "ii": True, "iii": True}


def test_preconditions():
    with pytest.raises(PreconditionError):
        check_witness_preconditions(BUILTIN["common_neighbor"], 2, 5, DEFAULT_ALPHA)
    with pytest.raises(PreconditionError):
        check_witness_preconditions(BUILTIN["pendant"], 3, 4, DEFAULT_ALPHA)
    check_witness_preconditions(BUILTIN["pendant"], 2, 4, DEFAULT_ALPHA)
