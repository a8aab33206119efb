"""Finite graphs with an optional successor relation.

Vertices are the dense range ``1..size``.  Edge arrays are canonical
(``i < j``), unique and lexicographically sorted; the successor relation is a
tuple of ordered pairs or ``None`` for plain graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidInput

PLAIN = "plain"
SUCCESSOR = "successor"


def _canonical_edges(size: int, edges) -> np.ndarray:
    arr = np.asarray(edges, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    if np.any(lo == hi):
        raise InvalidInput("self-loop in edge list")
    if lo.min() < 1 or hi.max() > size:
        raise InvalidInput(f"edge endpoint out of range 1..{size}")
    key = lo * (size + 1) + hi
    key = np.unique(key)
    out = np.empty((key.size, 2), dtype=np.int64)
    out[:, 0] = key // (size + 1)
    out[:, 1] = key % (size + 1)
    return out


class Structure:
    """Immutable finite structure ``([size], R, S)``.

    ``succ`` is ``None`` for a plain graph.  A successor structure may carry an
    empty relation.  Construction validates the invariants unless the caller
    passes ``validate=False`` (the sampler does, since it builds valid output).
    """

    def __init__(self, size: int, edges=(), succ: Iterable[tuple[int, int]] | None = None,
                 *, validate: bool = True, _canonical: bool = False):
        if size < 0:
            raise InvalidInput("size must be nonnegative")
        self.size = int(size)
        edges_arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2) if _canonical \
            else _canonical_edges(self.size, edges)
        edges_arr.flags.writeable = False
        self.edges = edges_arr
        self.succ = None if succ is None else tuple(sorted((int(x), int(y)) for x, y in succ))
        if validate:
            self._validate_succ()

    # -- invariants -------------------------------------------------------
    def _validate_succ(self) -> None:
        if self.succ is None:
            return
        heads: dict[int, int] = {}
        tails: dict[int, int] = {}
        seen = set()
        for x, y in self.succ:
            if not (1 <= x <= self.size and 1 <= y <= self.size):
                raise InvalidInput(f"succ pair ({x},{y}) out of range")
            if x == y:
                raise InvalidInput("succ must be irreflexive")
            if (y, x) in seen:
                raise InvalidInput("succ must be antisymmetric")
            if (x, y) in seen:
                raise InvalidInput("duplicate succ pair")
            seen.add((x, y))
            if x in heads or y in tails:
                raise InvalidInput("succ must be functional and injective")
            heads[x] = y
            tails[y] = x

    @property
    def kind(self) -> str:
        return PLAIN if self.succ is None else SUCCESSOR

    @property
    def vertices(self) -> range:
        return range(1, self.size + 1)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    # -- cached views -------------------------------------------------------
    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(map(tuple, self.edges.tolist()))

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) with sorted neighbour lists; index 0 is unused."""
        n = self.size
        if self.edges.shape[0] == 0:
            return np.zeros(n + 2, dtype=np.int64), np.zeros(0, dtype=np.int64)
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        counts = np.bincount(src, minlength=n + 1)
        indptr = np.zeros(n + 2, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:n + 2])
        return indptr, dst

    @cached_property
    def _nbr_cache(self) -> dict[int, frozenset[int]]:
        return {}

    def neighbors(self, v: int) -> frozenset[int]:
        cache = self._nbr_cache
        got = cache.get(v)
        if got is None:
            indptr, indices = self.csr
            got = frozenset(indices[indptr[v]:indptr[v + 1]].tolist())
            cache[v] = got
        return got

    def sorted_neighbors(self, v: int) -> np.ndarray:
        indptr, indices = self.csr
        return indices[indptr[v]:indptr[v + 1]]

    @cached_property
    def degrees(self) -> np.ndarray:
        indptr, _ = self.csr
        return np.diff(indptr)[: self.size + 1]

    def degree(self, v: int) -> int:
        return int(self.degrees[v])

    def has_edge(self, i: int, j: int) -> bool:
        if self.size <= 64:
            return (min(i, j), max(i, j)) in self.edge_set
        return j in self.neighbors(i)

    @cached_property
    def succ_next(self) -> dict[int, int]:
        return dict(self.succ or ())

    @cached_property
    def succ_prev(self) -> dict[int, int]:
        return {y: x for x, y in (self.succ or ())}

    def has_succ(self, x: int, y: int) -> bool:
        return self.succ_next.get(x) == y

    def s_neighbors(self, v: int) -> tuple[int, ...]:
        out = []
        if v in self.succ_next:
            out.append(self.succ_next[v])
        if v in self.succ_prev:
            out.append(self.succ_prev[v])
        return tuple(out)

    @cached_property
    def has_s_cycle(self) -> bool:
        nxt = self.succ_next
        prev = self.succ_prev
        # walk every maximal path from its predecessor-free start; whatever is
        # left over lies on a cycle
        visited: set[int] = set()
        for start in nxt:
            if start in prev:
                continue
            v = start
            while v is not None and v not in visited:
                visited.add(v)
                v = nxt.get(v)
        return any(v not in visited for v in nxt)

    @property
    def in_k_prime(self) -> bool:
        """True for structures with no S-cycle (the class allowed for patterns)."""
        return not self.has_s_cycle

    # -- identity -------------------------------------------------------------
    def _key(self):
        return (self.size, self.edges.tobytes(), self.succ)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Structure):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        s = "" if self.succ is None else f", succ={len(self.succ)}"
        return f"Structure(size={self.size}, edges={self.edge_count}{s})"

    def with_edges(self, edges, succ="keep") -> "Structure":
        """A new structure on the same vertex set (no in-place mutation)."""
        return Structure(self.size, edges, self.succ if succ == "keep" else succ)


@dataclass(frozen=True)
class Pair:
    """An ambient structure B with a distinguished base vertex set A."""

    ambient: Structure
    base: frozenset[int]

    def __post_init__(self):
        base = frozenset(int(a) for a in self.base)
        object.__setattr__(self, "base", base)
        if any(not 1 <= a <= self.ambient.size for a in base):
            raise InvalidInput("base vertex out of range")

    @property
    def new(self) -> frozenset[int]:
        return frozenset(self.ambient.vertices) - self.base

    @property
    def successor_mode(self) -> bool:
        return self.ambient.succ is not None


@dataclass(frozen=True)
class EmbeddingMap:
    """Injective assignment ``vertex of B -> vertex of M``.

    ``mode`` is ``"induced"`` or ``"positive"`` (edges of B outside the base
    must map to edges; non-edges are unconstrained).
    """

    assignment: Mapping[int, int]
    mode: str = "induced"
    base: frozenset[int] = field(default_factory=frozenset)


def induced_substructure(M: Structure, V: Iterable[int]) -> tuple[Structure, dict[int, int]]:
    """Restrict ``M`` to ``V``; vertices are relabelled ``1..|V|`` in increasing order."""
    verts = sorted(set(int(v) for v in V))
    if verts and (verts[0] < 1 or verts[-1] > M.size):
        raise InvalidInput("vertex out of range")
    relabel = {v: k + 1 for k, v in enumerate(verts)}
    keep = set(verts)
    if len(verts) == M.size:
        return M, relabel
    if M.edges.shape[0]:
        mask = np.isin(M.edges[:, 0], verts) & np.isin(M.edges[:, 1], verts)
        sub = [(relabel[i], relabel[j]) for i, j in M.edges[mask].tolist()]
    else:
        sub = []
    succ = None
    if M.succ is not None:
        succ = [(relabel[x], relabel[y]) for x, y in M.succ if x in keep and y in keep]
    return Structure(len(verts), sub, succ), relabel


def is_embedding(f: EmbeddingMap, B: Structure, M: Structure) -> bool:
    g = f.assignment
    if set(g) != set(B.vertices):
        raise InvalidInput("embedding map must be total on B")
    images = list(g.values())
    if len(set(images)) != len(images):
        raise InvalidInput("embedding map is not injective")
    if any(not 1 <= y <= M.size for y in images):
        return False
    base = f.base
    verts = list(B.vertices)
    check_s = M.succ is not None
    for idx, x in enumerate(verts):
        for y in verts[idx + 1:]:
            in_base = x in base and y in base
            eb = B.has_edge(x, y)
            em = M.has_edge(g[x], g[y])
            if f.mode == "induced":
                if eb != em:
                    return False
            elif eb and not em and not in_base:
                return False
            if check_s:
                for a, b in ((x, y), (y, x)):
                    sb = B.has_succ(a, b)
                    sm = M.has_succ(g[a], g[b])
                    if f.mode == "induced" and sb != sm:
                        return False
                    if sb and not sm and not in_base:
                        return False
    return True


def free_over(M: Structure, X: Iterable[int], Y: Iterable[int], A: Iterable[int]) -> bool:
    """No edge (nor S-pair) of ``M`` joins ``X - A`` to ``Y - A``."""
    A = set(A)
    xs = set(X) - A
    ys = set(Y) - A
    if not xs or not ys:
        return True
    small, big = (xs, ys) if len(xs) <= len(ys) else (ys, xs)
    for x in small:
        if any(y in big and y != x for y in M.neighbors(x)):
            return False
        if M.succ is not None and any(y in big and y != x for y in M.s_neighbors(x)):
            return False
    return True


def s_components(M: Structure) -> list[frozenset[int]]:
    """Connected components of the undirected S-graph, sorted by least element."""
    if M.succ is None:
        raise InvalidInput("s_components requires a successor structure")
    parent = list(range(M.size + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for x, y in M.succ:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)
    groups: dict[int, set[int]] = {}
    for v in M.vertices:
        groups.setdefault(find(v), set()).add(v)
    return sorted((frozenset(g) for g in groups.values()), key=min)
