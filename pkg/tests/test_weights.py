from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from decaylaw.errors import CapExceeded, GuardRejected, InvalidInput, PreconditionError
from decaylaw.patterns import BUILTIN
from decaylaw.structures import Pair, Structure
from decaylaw.weights import (DEFAULT_ALPHA, Alpha, Partition, enumerate_partitions, is_lambda_closed, weight,
                              weight_relative, xi_set, xi_value, zeta_value)

from strategies import plain_pairs

A7 = Fraction(7, 10)
BELL = [1, 1, 2, 5, 15, 52, 203, 877, 4140]


def P(size, edges, base, succ=None):
    return Pair(Structure(size, edges, succ), frozenset(base))


# -- alpha guard ------------------------------------------------------------

def test_default_alpha():
    assert DEFAULT_ALPHA.value == A7 and str(DEFAULT_ALPHA) == "7/10"


@pytest.mark.parametrize("text", ["1/2", "2/3", "5/6", "1", "0", "3/2"])
def test_guard_rejects(text):
    with pytest.raises(GuardRejected):
        Alpha.parse(text)


def test_guard_accepts_configurable_bound():
    assert Alpha.parse("7/10", guard_v_max=6).p == 7
    with pytest.raises(GuardRejected):
        Alpha.parse("7/10", guard_v_max=8)
    assert float(Alpha.parse("71/100")) == pytest.approx(0.71)


def test_parse_garbage():
    with pytest.raises(InvalidInput):
        Alpha.parse("seven tenths")


def test_dynamic_sign_guard():
    assert DEFAULT_ALPHA.sign(1, 1) == 1 and DEFAULT_ALPHA.sign(1, 2) == -1
    with pytest.raises(GuardRejected):
        DEFAULT_ALPHA.sign(7, 10)


# -- partitions ---------------------------------------------------------------

@pytest.mark.parametrize("n", range(len(BELL)))
def test_bell_numbers(n):
    assert sum(1 for _ in enumerate_partitions(range(n))) == BELL[n]


def test_partitions_unique_and_cover():
    parts = list(enumerate_partitions([1, 2, 3, 4]))
    assert len(set(parts)) == len(parts)
    assert all(p.ground == frozenset({1, 2, 3, 4}) for p in parts)


def test_constrained_partitions():
    got = {tuple(map(tuple, p.as_lists())) for p in enumerate_partitions([1, 2, 3], [(1, 2)])}
    assert got == {((1, 2), (3,)), ((1, 2, 3),)}
    assert [p.as_lists() for p in enumerate_partitions([])] == [[]]


def test_partition_cap():
    with pytest.raises(CapExceeded, match="pattern too large"):
        list(enumerate_partitions(range(9)))


def test_lambda_closed_examples():
    lam = Partition.of([[1, 2], [3]])
    assert is_lambda_closed([], lam)
    assert is_lambda_closed([1, 2], lam)
    assert is_lambda_closed([1, 2, 3], lam)
    assert not is_lambda_closed([1], lam)


# -- weights ----------------------------------------------------------------

def test_weight_examples():
    assert weight(P(1, [], {1}), Partition(())).w == 0
    isolated = weight(BUILTIN["isolated"], Partition.of([[2]]))
    assert (isolated.v, isolated.e, isolated.w) == (1, 0, 1)
    one = weight(BUILTIN["path2"], Partition.of([[2, 3]]))
    assert (one.v, one.e, one.w) == (1, 1, 1 - A7)
    disc = weight(BUILTIN["path2"], Partition.of([[2], [3]]))
    assert (disc.v, disc.e, disc.w) == (2, 2, 2 - 2 * A7)


def test_weight_relative_full_is_zero():
    pair = BUILTIN["path2"]
    w = weight_relative(pair, Partition.of([[2], [3]]), C=[2, 3])
    assert (w.v, w.e, w.w) == (0, 0, 0)
    w = weight_relative(pair, Partition.of([[2], [3]]), C=[2])
    assert (w.v, w.e) == (1, 1)
    with pytest.raises(PreconditionError):
        weight_relative(pair, Partition.of([[2, 3]]), C=[2])


def test_tag_checks():
    with pytest.raises(InvalidInput):
        weight(BUILTIN["path2"], Partition.of([[2]]))  # does not cover B - A
    succ_pair = P(3, [(1, 2)], {1}, succ=[(2, 3)])
    with pytest.raises(InvalidInput):
        weight(succ_pair, Partition.of([[2], [3]]))  # S-pair split across blocks
    assert weight(succ_pair, Partition.of([[2, 3]])).v == 1


def test_xi_examples():
    assert xi_set(BUILTIN["pendant"]) == [Partition.of([[2]])]
    assert xi_set(BUILTIN["common_neighbor"]) == []
    assert set(xi_set(BUILTIN["path2"])) == {Partition.of([[2], [3]]), Partition.of([[2, 3]])}
    assert xi_value(BUILTIN["pendant"]) == 1 - A7
    assert xi_value(BUILTIN["path2"]) == 2 - 2 * A7
    assert xi_value(BUILTIN["common_neighbor"]) is None


def test_zeta_examples():
    assert zeta_value(BUILTIN["pendant"]) == 1 - A7
    assert zeta_value(BUILTIN["path2"]) == 1 - A7


def test_xi_needs_le_star():
    with pytest.raises(PreconditionError):
        xi_value(P(2, [], {1}, succ=[(1, 2)]))


# -- properties ---------------------------------------------------------------

@given(plain_pairs())
def test_xi_partitions_have_positive_closed_parts(pair):
    for lam in xi_set(pair):
        blocks = [sorted(b) for b in lam.blocks]
        for r in range(1, len(blocks) + 1):
            for combo in itertools.combinations(blocks, r):
                C = [x for b in combo for x in b]
                w = weight_relative(pair, lam, C=[], D=C)
                assert w.w > 0


@given(plain_pairs(), st.data())
def test_additivity_over_closed_split(pair, data):
    lam = data.draw(st.sampled_from(list(enumerate_partitions(pair.new))))
    blocks = list(lam.blocks)
    picks = data.draw(st.lists(st.booleans(), min_size=len(blocks), max_size=len(blocks)))
    C = frozenset().union(*(b for b, keep in zip(blocks, picks) if keep))
    lower = weight_relative(pair, lam, C=[], D=C)
    upper = weight_relative(pair, lam, C=C)
    assert lower.v + upper.v == len(lam)
    assert lower.w + upper.w == weight(pair, lam).w


@given(plain_pairs())
def test_discrete_partition_has_most_blocks_and_long_edges(pair):
    disc = weight(pair, Partition.discrete(sorted(pair.new)))
    for lam in enumerate_partitions(pair.new):
        w = weight(pair, lam)
        assert w.e <= disc.e
        assert w.v <= disc.v
