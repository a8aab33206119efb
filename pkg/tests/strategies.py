"""Shared hypothesis strategies for small structures."""

from __future__ import annotations

from hypothesis import strategies as st

from decaylaw.structures import Pair, Structure


@st.composite
def plain_structures(draw, min_size=1, max_size=6):
    n = draw(st.integers(min_size, max_size))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    edges = [p for p in pairs if draw(st.booleans())]
    return Structure(n, edges)


@st.composite
def successor_structures(draw, min_size=1, max_size=6):
    """Random edges plus an S-relation made of disjoint increasing chains."""
    n = draw(st.integers(min_size, max_size))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    edges = [p for p in pairs if draw(st.booleans())]
    order = draw(st.permutations(list(range(1, n + 1))))
    succ = [(order[k], order[k + 1]) for k in range(n - 1) if draw(st.booleans())]
    return Structure(n, edges, succ)


@st.composite
def plain_pairs(draw, max_base=3, max_new=4):
    a = draw(st.integers(0, max_base))
    b = draw(st.integers(0, max_new))
    S = draw(plain_structures(min_size=a + b, max_size=a + b)) if a + b else Structure(0)
    return Pair(S, frozenset(range(1, a + 1)))
