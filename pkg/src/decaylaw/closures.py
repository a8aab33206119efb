"""Closure operators on host structures.

``cl_step(X)`` adds every ``C`` with ``|C| <= k`` and ``C & X <*_i C``.  A
candidate must be connected in ``R | S``: were it to split freely over its
intersection with ``X``, the free part alone would be a positive extension.
Candidates are enumerated rooted at their least vertex of ``X`` (ESU style, so
each connected set is produced once) and each one is decided on its induced
substructure through a cache keyed by the local form.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numba
import numpy as np

from .errors import CapExceeded, InvalidInput
from .relations import oracle_for
from .structures import Structure
from .weights import DEFAULT_ALPHA, Alpha

K_CAP = 6
M_CAP = 8


@dataclass
class ClosureTrace:
    stages: list[frozenset[int]]
    witnesses: dict[int, frozenset[int]] = field(default_factory=dict)
    candidates: int = 0

    @property
    def result(self) -> frozenset[int]:
        return self.stages[-1]

    def to_json(self) -> dict:
        return {
            "stages": [sorted(s) for s in self.stages],
            "witnesses": {str(v): sorted(c) for v, c in sorted(self.witnesses.items())},
            "candidates": self.candidates,
        }


class LocalDecider:
    """``C & X <*_i C`` on induced substructures, cached by local form."""

    def __init__(self, M: Structure, alpha: Alpha):
        self.M = M
        self.alpha = alpha
        self.successor = M.succ is not None
        self.cache: dict[tuple, bool] = {}

    def key(self, verts: tuple[int, ...], X: frozenset[int] | set[int]) -> tuple:
        M = self.M
        s = len(verts)
        adj = 0
        bit = 0
        for a in range(s):
            na = M.neighbors(verts[a])
            for b in range(a + 1, s):
                if verts[b] in na:
                    adj |= 1 << bit
                bit += 1
        sb = 0
        if self.successor:
            nxt = M.succ_next
            for a in range(s):
                y = nxt.get(verts[a])
                if y is not None and y in verts:
                    sb |= 1 << (a * s + verts.index(y))
        base = 0
        for a in range(s):
            if verts[a] in X:
                base |= 1 << a
        return s, adj, sb, base

    def decide(self, verts: tuple[int, ...], X) -> bool:
        key = self.key(verts, X)
        got = self.cache.get(key)
        if got is None:
            got = self._solve(key)
            self.cache[key] = got
        return got

    def _solve(self, key: tuple) -> bool:
        s, adj, sb, base = key
        edges = []
        bit = 0
        for a in range(s):
            for b in range(a + 1, s):
                if adj >> bit & 1:
                    edges.append((a + 1, b + 1))
                bit += 1
        succ = None
        if self.successor:
            succ = [(a + 1, b + 1) for a in range(s) for b in range(s) if sb >> (a * s + b) & 1]
        sub = Structure(s, edges, succ)
        O = oracle_for(sub, self.alpha)
        full = (1 << s) - 1
        return base != full and O.le_star(base, full) and O.is_i(base, full)


def _host_neighbors(M: Structure, v: int) -> Iterable[int]:
    if M.succ is None:
        return M.neighbors(v)
    return M.neighbors(v) | frozenset(M.s_neighbors(v))


def connected_sets(M: Structure, root: int, k: int, allowed, viable=None) -> Iterator[tuple[int, ...]]:
    """Connected (in R|S) vertex sets of size <= k containing ``root``, each
    once.  ``allowed(u)`` filters the other members.  ``viable(sub, k)`` may
    prune a branch; it must be monotone (false for a set means false for
    every superset reachable from it)."""
    nbr_cache: dict[int, list[int]] = {}

    def nbrs(v):
        got = nbr_cache.get(v)
        if got is None:
            got = sorted(u for u in _host_neighbors(M, v) if u != root and allowed(u))
            nbr_cache[v] = got
        return got

    last = getattr(viable, "last_vertex_test", None)

    def extend(sub: list[int], ext: list[int], closed: set[int]):
        if viable is not None and not viable(sub, k):
            return
        yield tuple(sorted(sub))
        if len(sub) == k:
            return
        if last is not None and len(sub) == k - 1:
            ok = last(sub)
            for w in ext:
                if ok(w):
                    sub.append(w)
                    if viable(sub, k):
                        yield tuple(sorted(sub))
                    sub.pop()
            return
        ext = list(ext)
        while ext:
            w = ext.pop()
            excl = [u for u in nbrs(w) if u not in closed]
            new_closed = closed | set(excl)
            sub.append(w)
            yield from extend(sub, ext + excl, new_closed)
            sub.pop()

    first = nbrs(root)
    yield from extend([root], list(reversed(first)), {root} | set(first))


class EdgeBound:
    """Prunes candidates that cannot reach the edge count an ``i``-extension needs.

    The finest tag over the new part ``D`` must already be negative, so
    ``e(C) - e(C & X) > v * q / p`` with ``v = |D|`` on plain hosts and
    ``v >= 1`` with a successor relation.  On plain hosts every new vertex also
    needs more than ``1/alpha`` neighbours inside the candidate (tag it alone
    over the rest).  A branch survives if some choice of at most
    ``k - |sub|`` further vertices could meet both bounds.
    """

    def __init__(self, M: Structure, X: frozenset[int], alpha: Alpha, x_avail: int):
        self.M = M
        self.X = X
        self.p, self.q = alpha.p, alpha.q
        self.plain = M.succ is None
        self.x_avail = x_avail
        # a lone new vertex needs more than 1/alpha edges into the candidate
        self.delta = self.q // self.p + 1

    def _stats(self, sub):
        X = self.X
        M = self.M
        e = 0
        dn = 0
        deg = {}
        for a_idx, a in enumerate(sub):
            ina = a in X
            if not ina:
                dn += 1
                deg.setdefault(a, 0)
            na = M.neighbors(a)
            for b in sub[a_idx + 1:]:
                if b in na and not (ina and b in X):
                    e += 1
                    if not ina:
                        deg[a] += 1
                    if b not in X:
                        deg[b] = deg.get(b, 0) + 1
        return e, dn, deg

    def last_vertex_test(self, sub: list[int]):
        """A cheap exact filter for the final vertex of a size-``k`` candidate."""
        e, dn, deg = self._stats(sub)
        M = self.M
        X = self.X
        hits_needed = self.need(dn + 1) - e
        short = [d for d, g in deg.items() if g < self.delta] if self.plain else []
        members = list(sub)
        full = self

        def ok(w):
            if w in X:
                return True  # rare; the full bound decides
            nw = M.neighbors(w)
            for d in short:
                if d not in nw:
                    return False
            if not full.plain:
                return True
            h = 0
            for u in members:
                if u in nw:
                    h += 1
            return h >= hits_needed and h >= full.delta

        return ok

    def need(self, dn: int) -> int:
        v = dn if self.plain else min(dn, 1)
        return v * self.q // self.p + 1

    def __call__(self, sub: list[int], k: int) -> bool:
        e, dn, deg = self._stats(sub)
        s = len(sub)
        if self.plain and any(g + (k - s) < self.delta for g in deg.values()):
            return False
        for j in range(0, k - s + 1):
            reach = e + j * s + j * (j - 1) // 2
            for jd in range(max(0, j - self.x_avail), j + 1):
                if dn + jd > 0 and reach >= self.need(dn + jd):
                    return True
        return False


def _check_caps(k: int, m: int | None = None) -> None:
    if not 1 <= k <= K_CAP:
        raise CapExceeded(f"closure size k={k} outside 1..{K_CAP}")
    if m is not None and m < 0:
        raise InvalidInput("m must be nonnegative")


def cl_step_traced(X: Iterable[int], M: Structure, k: int, alpha: Alpha = DEFAULT_ALPHA,
                   decider: LocalDecider | None = None, prune: bool = True) -> tuple[frozenset[int], dict[int, frozenset[int]], int]:
    """One closure stage; returns (new set, witness per added vertex, candidates tried)."""
    _check_caps(k)
    X = frozenset(X)
    dec = decider or LocalDecider(M, alpha)
    added: dict[int, frozenset[int]] = {}
    tried = 0
    roots = sorted(X)
    for idx, root in enumerate(roots):
        def allowed(u, root=root):
            return u not in X or u > root

        bound = EdgeBound(M, X, dec.alpha, len(roots) - idx - 1) if prune else None
        for C in connected_sets(M, root, k, allowed, bound):
            if len(C) < 2 or all(v in X for v in C):
                continue
            tried += 1
            if dec.decide(C, X):
                for v in C:
                    if v not in X and v not in added:
                        added[v] = frozenset(C)
    return X | frozenset(added), added, tried


def cl_step(X: Iterable[int], M: Structure, k: int, alpha: Alpha = DEFAULT_ALPHA) -> frozenset[int]:
    return cl_step_traced(X, M, k, alpha)[0]


def cl_km_trace(A: Iterable[int], M: Structure, k: int, m: int | None, alpha: Alpha = DEFAULT_ALPHA) -> ClosureTrace:
    """``m`` closure stages from ``A``; ``m=None`` iterates to the fixpoint."""
    _check_caps(k, m)
    dec = LocalDecider(M, alpha)
    cur = frozenset(A)
    trace = ClosureTrace([cur])
    steps = M.size + 1 if m is None else m
    for _ in range(steps):
        nxt, wit, tried = cl_step_traced(cur, M, k, alpha, dec)
        trace.candidates += tried
        if nxt == cur:
            break
        trace.stages.append(nxt)
        trace.witnesses.update(wit)
        cur = nxt
    return trace


def cl_km(A: Iterable[int], M: Structure, k: int, m: int, alpha: Alpha = DEFAULT_ALPHA) -> frozenset[int]:
    return cl_km_trace(A, M, k, m, alpha).result


def cl_k(A: Iterable[int], M: Structure, k: int, alpha: Alpha = DEFAULT_ALPHA) -> frozenset[int]:
    return cl_km_trace(A, M, k, None, alpha).result


# ---------------------------------------------------------------------------
# successor closures


def _need_succ(B: Structure) -> None:
    if B.succ is None:
        raise InvalidInput("successor closures require a successor structure")


def rcl_k(A: Iterable[int], B: Structure, k: int | None = None) -> frozenset[int]:
    """Add S-neighbours ``k`` times (``None``: to the fixpoint)."""
    _need_succ(B)
    cur = frozenset(A)
    step = 0
    while k is None or step < k:
        grow = {y for x in cur for y in B.s_neighbors(x)}
        nxt = cur | grow
        if nxt == cur:
            break
        cur = nxt
        step += 1
    return cur


def scl_k(A: Iterable[int], B: Structure, k: int | None = None) -> frozenset[int]:
    # endpoint predicates are never sampled, so scl coincides with rcl here
    return rcl_k(A, B, k)


# ---------------------------------------------------------------------------
# brute-force oracle over all small vertex sets (plain hosts)


@numba.njit(cache=True, inline="always")
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@numba.njit(cache=True)
def _local_is_i(adj, verts, s, base, p, q, work):
    """``base <*_i verts`` on a plain host, straight from the definition."""
    full = (1 << s) - 1
    if base == full:
        return False
    ladj, rgs, mx, blocks, elems = work[0], work[1], work[2], work[3], work[4]
    for a in range(s):
        ladj[a] = 0
        for b in range(s):
            if a != b and adj[verts[a], verts[b]]:
                ladj[a] |= 1 << b
    rest_all = full & ~base
    sub = 0
    while True:
        Ap = base | sub
        if Ap != full:
            D = full & ~Ap
            r = 0
            for a in range(s):
                if D >> a & 1:
                    elems[r] = a
                    r += 1
            for t in range(r):
                rgs[t] = 0
                mx[t] = 0
            while True:
                nb = 0
                for t in range(r):
                    if rgs[t] + 1 > nb:
                        nb = rgs[t] + 1
                for t in range(nb):
                    blocks[t] = 0
                for t in range(r):
                    blocks[rgs[t]] |= 1 << elems[t]
                # long edges: into Ap once, between distinct blocks counted from both ends
                e2 = 0
                for t in range(nb):
                    blk = blocks[t]
                    for a in range(s):
                        if blk >> a & 1:
                            e2 += 2 * _popcount(ladj[a] & Ap) + _popcount(ladj[a] & D & ~blk)
                e = e2 // 2
                if nb * q - e * p > 0:
                    return False
                # next restricted growth string
                i = r - 1
                while i > 0 and rgs[i] == mx[i - 1] + 1:
                    i -= 1
                if i <= 0:
                    break
                rgs[i] += 1
                mx[i] = max(mx[i - 1], rgs[i])
                for j in range(i + 1, r):
                    rgs[j] = 0
                    mx[j] = mx[i]
        if sub == rest_all:
            break
        sub = (sub - rest_all) & rest_all
    return True


@numba.njit(cache=True)
def _brute_cl_step(adj, inX, k, p, q):
    n = adj.shape[0]
    added = np.zeros(n, dtype=np.bool_)
    verts = np.zeros(8, dtype=np.int64)
    idx = np.zeros(8, dtype=np.int64)
    work = np.zeros((5, 8), dtype=np.int64)
    for s in range(1, min(k, n) + 1):
        for t in range(s):
            idx[t] = t
        while True:
            base = 0
            for t in range(s):
                verts[t] = idx[t]
                if inX[idx[t]]:
                    base |= 1 << t
            if _local_is_i(adj, verts, s, base, p, q, work):
                for t in range(s):
                    if not inX[idx[t]]:
                        added[idx[t]] = True
            # next combination
            i = s - 1
            while i >= 0 and idx[i] == n - s + i:
                i -= 1
            if i < 0:
                break
            idx[i] += 1
            for j in range(i + 1, s):
                idx[j] = idx[j - 1] + 1
    return added


def brute_force_cl_step(X: Iterable[int], M: Structure, k: int, alpha: Alpha = DEFAULT_ALPHA) -> frozenset[int]:
    """``cl_step`` by scanning every vertex set of size <= k (plain hosts only)."""
    if M.succ is not None:
        raise InvalidInput("brute-force closure oracle supports plain hosts only")
    _check_caps(k)
    n = M.size
    adj = np.zeros((n, n), dtype=np.bool_)
    if M.edge_count:
        e = M.edges - 1
        adj[e[:, 0], e[:, 1]] = True
        adj[e[:, 1], e[:, 0]] = True
    X = frozenset(X)
    inX = np.zeros(n, dtype=np.bool_)
    for v in X:
        inX[v - 1] = True
    added = _brute_cl_step(adj, inX, k, alpha.p, alpha.q)
    return X | frozenset((np.flatnonzero(added) + 1).tolist())

