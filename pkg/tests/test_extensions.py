from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from decaylaw.errors import InvalidInput
from decaylaw.experiments.extensions import (ExtensionSearch, avoiding_extensions, boundary_placements,
                                              enumerate_extensions, exact_max_disjoint, fact23_bound,
                                              far_tuple_exists, greedy_disjoint_family, near_set,
                                              sample_placements, window_near, windowed_disjoint_family)
from decaylaw.patterns import BUILTIN
from decaylaw.sampler import sample_model
from decaylaw.structures import EmbeddingMap, Pair, Structure, is_embedding

from strategies import plain_structures

PENDANT, PATH2, CN = BUILTIN["pendant"], BUILTIN["path2"], BUILTIN["common_neighbor"]


def brute_count(M, pattern, f, mode):
    new = sorted(pattern.new)
    free = [v for v in M.vertices if v not in f.values()]
    total = 0
    for imgs in itertools.permutations(free, len(new)):
        g = dict(f)
        g.update(zip(new, imgs))
        if is_embedding(EmbeddingMap(g, mode, pattern.base), pattern.ambient, M):
            total += 1
    return total


def test_trivial_counts():
    M = sample_model("m0", 40, 1)
    same = Pair(Structure(1, []), frozenset({1}))
    assert enumerate_extensions(M, {1: 5}, same).count == 1
    one = Pair(Structure(1, []), frozenset())
    assert enumerate_extensions(M, {}, one).count == 40
    assert enumerate_extensions(M, {1: 7}, PENDANT).count == M.degree(7)


def test_as_list_maps():
    M = Structure(4, [(1, 2), (1, 3), (2, 3)])
    maps = enumerate_extensions(M, {1: 1}, PENDANT, as_list=True)
    assert sorted(g[2] for g in maps) == [2, 3]


def test_avoiding_examples():
    M = sample_model("m0", 60, 2)
    f = {1: 10}
    full = enumerate_extensions(M, f, PATH2, "positive").count
    assert avoiding_extensions(M, f, PATH2, set(), "positive").count == full
    assert avoiding_extensions(M, f, PATH2, set(f.values()), "positive").count == full
    assert avoiding_extensions(M, f, PATH2, set(M.vertices), "positive").count == 0


def test_single_neighbour_family_is_degree():
    M = sample_model("m0", 80, 4)
    assert len(greedy_disjoint_family(M, {1: 30}, PENDANT)) == M.degree(30)
    assert len(greedy_disjoint_family(Structure(5, []), {1: 1}, PENDANT)) == 0


def test_far_examples():
    M = sample_model("m0", 200, 5)
    assert far_tuple_exists(M, {1: 100}, PENDANT, 0.1, 0).exists
    empty = Structure(200, [])
    assert not far_tuple_exists(empty, {1: 100}, PENDANT, 0.1, 1).exists
    assert fact23_bound(16000, 2, 0.1, 10) == pytest.approx(4 * 16000 ** 0.1 + 9)


def test_near_set():
    assert near_set(100, [50], 0.5) == frozenset(range(41, 60))  # |v-50| < 10
    assert near_set(100, [1], 0.5) == frozenset(range(1, 11))


def test_window_examples():
    M = sample_model("m0", 200, 6)
    fam = windowed_disjoint_family(M, {1: 10}, PATH2, (50, 51))
    assert len(fam) <= 1
    assert window_near(1000, {1: 10}, 0.1) == (11, 11 + 502)
    lo, hi = window_near(1000, {1: 990}, 0.1)
    assert hi == 990 and hi - lo == 502
    with pytest.raises(InvalidInput):
        windowed_disjoint_family(M, {1: 10}, PATH2, (0, 5))


def test_placements():
    M = sample_model("m0", 100, 7)
    rng = np.random.default_rng(0)
    maps = sample_placements(M, CN, rng, 5, "positive", min_gap=3)
    assert len(maps) == 5
    for f in maps:
        assert f[1] + 3 <= f[2]
    bnd = boundary_placements(M, CN, "positive")
    assert set(bnd) == {"boundary-left", "boundary-right"}
    assert bnd["boundary-left"][1] == 1 and bnd["boundary-right"][2] == 100


def test_bad_base_map():
    M = sample_model("m0", 20, 1)
    with pytest.raises(InvalidInput):
        enumerate_extensions(M, {1: 3, 2: 3}, CN)
    with pytest.raises(InvalidInput):
        ExtensionSearch(M, CN, {1: 3}, "weird")


def test_node_cap_censors():
    M = sample_model("m0", 400, 1)
    res = ExtensionSearch(M, PATH2, {1: 200}, "positive", node_cap=5).count()
    assert res.censored


@given(plain_structures(min_size=3, max_size=9), st.sampled_from(["pendant", "path2", "common_neighbor",
                                                                   "triangle_through"]),
       st.sampled_from(["induced", "positive"]), st.data())
def test_count_matches_brute_force(M, name, mode, data):
    pattern = BUILTIN[name]
    base = sorted(pattern.base)
    imgs = data.draw(st.lists(st.sampled_from(list(M.vertices)), min_size=len(base), max_size=len(base),
                              unique=True))
    f = dict(zip(base, imgs))
    try:
        got = enumerate_extensions(M, f, pattern, mode).count
    except InvalidInput:  # f itself is not an induced copy of A
        got = 0
    assert got == brute_count(M, pattern, f, mode)


@given(plain_structures(min_size=4, max_size=12), st.data())
def test_greedy_is_half_approximation(M, data):
    r = data.draw(st.integers(1, M.size))
    fam = greedy_disjoint_family(M, {1: r}, PATH2, "positive")
    sets = [frozenset(im) for im in ExtensionSearch(M, PATH2, {1: r}, "positive").iter_images()]
    best = exact_max_disjoint(sets)
    assert len(fam) <= best
    assert 2 * len(fam) >= best
    images = [frozenset(g[v] for v in PATH2.new) for g in fam.members]
    assert all(not (a & b) for a, b in itertools.combinations(images, 2))


@given(plain_structures(min_size=4, max_size=12), st.data())
def test_far_agrees_with_exact_packing(M, data):
    r = data.draw(st.integers(1, M.size))
    k = data.draw(st.integers(1, 3))
    eps = data.draw(st.sampled_from([0.2, 0.4]))
    near = near_set(M.size, [r], eps)
    sets = [frozenset(im) for im in ExtensionSearch(M, PATH2, {1: r}, "positive", forbidden=near).iter_images()]
    got = far_tuple_exists(M, {1: r}, PATH2, eps, k, "positive")
    assert got.exists == (exact_max_disjoint(sets) >= k)
