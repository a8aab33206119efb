"""Seeded property suite for the weight calculus and the starred relations.

Each instance is a small structure ``F`` with a base ``A`` (``|A| <= 3``,
``|F - A| <= max_new``).  Odd instances carry a successor relation made of
S-chains that stay inside ``A`` or inside ``F - A``, so ``A <=* F`` always
holds.  Every property is evaluated on all sub-configurations the instance
offers (intermediate sets, tags, splits) and a check is counted only when its
hypotheses hold.
"""

from __future__ import annotations

from collections import defaultdict
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .relations import Oracle, submasks
from .structures import Structure
from .weights import DEFAULT_ALPHA, Alpha, Kernel, bits

# numba's OpenMP pool does not survive fork()
_SPAWN = multiprocessing.get_context("spawn")

PROPERTIES = (
    "i_characterisations", "s_characterisations", "i_transitive", "s_transitive", "decompose",
    "smooth_a", "smooth_b", "not_s_iff_c_stage", "s_downward", "xi_monotone", "xi_equality_iff_free",
    "xi_strict_drop", "xi_weak_drop", "free_extension_is_s", "i_upward", "pr_singleton_i", "additivity",
    "block_completion", "base_shrink", "base_shrink_free", "split_sum_literal", "split_sum_bound",
    "successor_i_descends_literal", "successor_i_descends", "refine_two_sided",
)


@dataclass
class Tally:
    checks: dict[str, int] = field(default_factory=lambda: defaultdict(int))
    violations: list[dict] = field(default_factory=list)

    def check(self, name: str, ok: bool, instance: int, **detail) -> None:
        self.checks[name] += 1
        if not ok:
            self.violations.append({"property": name, "instance": instance, **detail})

    def merge(self, other: "Tally") -> None:
        for k, v in other.checks.items():
            self.checks[k] += v
        self.violations.extend(other.violations)

    @property
    def total(self) -> int:
        return sum(self.checks.values())


# ---------------------------------------------------------------------------
# instance generation


def _chains(rng: np.random.Generator, verts: list[int]) -> list[list[int]]:
    """Random split of a shuffled vertex list into consecutive runs."""
    verts = list(verts)
    rng.shuffle(verts)
    runs, cur = [], []
    for v in verts:
        cur.append(v)
        if rng.random() < 0.45:
            runs.append(cur)
            cur = []
    if cur:
        runs.append(cur)
    return runs


def random_instance(seed: int, index: int, max_new: int = 5) -> tuple[Structure, frozenset[int]]:
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    a = int(rng.integers(0, 4))
    m = int(rng.integers(1, max_new + 1))
    n = a + m
    perm = [int(x) + 1 for x in rng.permutation(n)]
    base, new = perm[:a], perm[a:]
    p = float(rng.choice([0.2, 0.35, 0.5, 0.7]))
    successor = index % 2 == 1
    tails: set[int] = set()
    succ = None
    if successor:
        succ = []
        k = 0
        if m >= 2 and rng.random() < 0.5:
            # edge-free S-tails hanging off chains inside F - A
            k = int(rng.integers(1, min(2, m - 1) + 1))
            tails = set(new[:k])
        inner = _chains(rng, new[k:])
        for t in new[:k]:
            inner[int(rng.integers(0, len(inner)))].append(t)
        chains = _chains(rng, base) + inner
        for c in chains:
            if rng.random() < 0.5:
                c.reverse()
            succ.extend(zip(c, c[1:]))
    edges = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if i in tails or j in tails:
                continue
            if rng.random() < p:
                edges.append((i, j))
    return Structure(n, edges, succ), frozenset(base)


def split_structure(S: Structure, P: frozenset[int], Q: frozenset[int]) -> Structure:
    """Drop every edge and S-pair between ``P`` and ``Q``."""
    def crosses(x, y):
        return (x in P and y in Q) or (x in Q and y in P)

    edges = [tuple(e) for e in S.edges.tolist() if not crosses(*e)]
    succ = None if S.succ is None else [s for s in S.succ if not crosses(*s)]
    return Structure(S.size, edges, succ)


# ---------------------------------------------------------------------------
# properties


def _restrict(blocks, C: int) -> tuple[int, ...]:
    return tuple(b & C for b in blocks if b & C)


def _outside(blocks, C: int) -> tuple[int, ...]:
    return tuple(b for b in blocks if not b & C)


def _no_edges_between(K: Kernel, X: int, Y: int) -> bool:
    return all(not (K.adj[k] | K.sadj[k]) & Y for k in bits(X))


def check_instance(S: Structure, base: frozenset[int], alpha: Alpha, index: int,
                   rng: np.random.Generator, tally: Tally) -> None:
    K = Kernel(S, alpha)
    O = Oracle(K)
    A = K.mask(base)
    F = K.full
    D = F & ~A
    chk = tally.check
    mids = [A | E for E in submasks(D) if K.le_star(A | E, F)]

    # characterisations on every (A, Y) and (Y, F)
    for Y in mids:
        for X, Z in ((A, Y), (Y, F)):
            i = O.is_i(X, Z)
            chk("i_characterisations", i == O.i_alt_ii(X, Z) == O.i_alt_iii(X, Z), index, X=X, Z=Z)
            chk("s_characterisations", O.is_s(X, Z) == O.is_s_direct(X, Z), index, X=X, Z=Z)

    iAF, sAF = O.is_i(A, F), O.is_s(A, F)
    for Y in mids:
        if O.is_i(A, Y) and O.is_i(Y, F):
            chk("i_transitive", iAF, index, Y=Y)
        if O.is_s(A, Y) and O.is_s(Y, F):
            chk("s_transitive", sAF, index, Y=Y)
        if sAF:
            chk("s_downward", O.is_s(A, Y), index, Y=Y)
        if iAF:
            chk("i_upward", O.is_i(Y, F), index, Y=Y)

    try:
        Y = O.decompose(A, F)
        chk("decompose", O.is_i(A, Y) and O.is_s(Y, F) and O.le_star(Y, F), index, Y=Y)
    except AssertionError as exc:
        chk("decompose", False, index, error=str(exc))

    if A != F:
        stage = any(O.lt_star(A, C) and O.is_c(A, C) for C in mids)
        chk("not_s_iff_c_stage", (not sAF) == stage, index)

    # xi comparisons
    for E in submasks(D):
        B1, A2 = A | E, F & ~E
        if K.le_star(A, A2) and K.le_star(B1, F) and O.is_s(A, B1) and O.is_s(A2, F):
            x1, x2 = K.xi_value(A, B1), K.xi_value(A2, F)
            chk("xi_monotone", x1 >= x2, index, E=E)
            chk("xi_equality_iff_free", (x1 == x2) == _no_edges_between(K, A2 & ~A, E), index, E=E)
    strict = [Y for Y in mids if Y != A and O.is_s(A, Y)]
    for Y1 in strict:
        for Y2 in strict:
            if Y1 != Y2 and not Y1 & ~Y2 and O.le_star(Y1, Y2) and O.is_i(Y1, Y2):
                x1, x2 = K.xi_value(A, Y1), K.xi_value(A, Y2)
                chk("xi_strict_drop", x1 > x2, index, Y1=Y1, Y2=Y2)
                chk("xi_weak_drop", x1 >= x2, index, Y1=Y1, Y2=Y2)

    for Y in submasks(F):
        if Y != F and K.le_star(Y, F) and _no_edges_between(K, Y, F & ~Y) and (F & ~Y).bit_count() <= alpha.guard_v_max:
            # S-pairs across are already excluded by <=*
            chk("free_extension_is_s", O.is_s(Y, F), index, Y=Y)

    if A != F and O.is_pr(A, F):
        for k in bits(D):
            X = K.scl(A | 1 << k, F)
            chk("pr_singleton_i", O.le_star(X, F) and O.is_i(X, F), index, a=k + 1)

    # smoothness
    atoms = K.atoms(D)
    for sel in range(1, (1 << len(atoms)) - 1):
        P = 0
        for j, at in enumerate(atoms):
            if sel >> j & 1:
                P |= at
        Q = D & ~P
        B, C = A | P, A | Q
        if not (K.le_star(A, B) and K.le_star(A, C) and K.le_star(B, F) and K.le_star(C, F)):
            continue
        if O.is_c(A, B):
            chk("smooth_a", O.is_c(C, F), index, P=P)
        if O.is_i(A, C):
            chk("smooth_a", O.is_i(B, F), index, P=P)
    if D.bit_count() >= 2:
        for _ in range(3):
            P = 0
            while P in (0, D):
                P = int(rng.integers(1, D + 1)) & D
            Q = D & ~P
            S2 = split_structure(S, K.verts(P), K.verts(Q))
            K2 = Kernel(S2, alpha)
            O2 = Oracle(K2)
            B, C = A | P, A | Q
            if not (K2.le_star(A, B) and K2.le_star(A, C)):
                continue
            ok = (O2.is_c(A, B) == O2.is_c(C, F) and O2.is_i(A, B) == O2.is_i(C, F)
                  and O2.is_s(A, B) == O2.is_s(C, F))
            chk("smooth_b", ok, index, P=P)

    # tag-level identities
    for lam in K.partitions(D):
        v, e = K.ve(A, F, lam)
        w = alpha.weight(v, e)
        for C, sub in K.closed_unions(lam):
            Y = A | C
            rest = _outside(lam, C)
            v1, e1 = K.ve(A, Y, sub)
            v2, e2 = K.ve(Y, F, rest)
            ok = (v1 + v2 == v and e1 + e2 == e
                  and alpha.weight(v1, e1) + alpha.weight(v2, e2) == w)
            chk("additivity", ok, index, C=C)
        for Dp in submasks(D):
            if not Dp:
                continue
            Dplus = 0
            for b in lam:
                if b & Dp:
                    Dplus |= b
            chk("block_completion",
                K.weight(A, A | Dplus, _restrict(lam, Dplus)) <= K.weight(A, A | Dp, _restrict(lam, Dp)),
                index, Dp=Dp)
        for Ap in submasks(A):
            Bp = Ap | D
            if not (K.le_star(Ap, A) and K.le_star(Bp, F) and K.le_star(Ap, Bp)):
                continue
            vp, ep = K.ve(Ap, Bp, lam)
            chk("base_shrink", vp == v and ep <= e and alpha.weight(vp, ep) >= w, index, Ap=Ap)
            if _no_edges_between(K, A & ~Ap, D):
                chk("base_shrink_free", ep == e and alpha.weight(vp, ep) == w, index, Ap=Ap)
        # a random grouping of blocks into closed pieces B_i^+ with cores B_i
        nb = len(lam)
        if nb:
            labels = rng.integers(0, int(rng.integers(1, nb + 1)), size=nb)
            total = 0
            ok_hyp = True
            for g in set(labels.tolist()):
                group = [b for b, lb in zip(lam, labels) if lb == g]
                Bplus = 0
                Bi = 0
                for b in group:
                    Bplus |= b
                    pieces = K.atoms(b)
                    pick = int(rng.integers(1, 1 << len(pieces)))
                    for j, pc in enumerate(pieces):
                        if pick >> j & 1:
                            Bi |= pc
                if not (K.le_star(A, A | Bi) and K.le_star(A | Bi, A | Bplus) and K.le_star(A | Bplus, F)):
                    ok_hyp = False
                    break
                total += K.weight(A, A | Bi, _restrict(group, Bi))
            if ok_hyp:
                chk("split_sum_literal", w >= total, index)
                chk("split_sum_bound", w <= total, index)

    # two-sided refinement of positive tags
    for Xp in O.intermediates(A, F):
        for lam in K.partitions(F & ~Xp):
            if K.sign(Xp, F, lam) > 0:
                try:
                    Xpp = O.refine(Xp, F, lam)
                    chk("refine_two_sided", O.star1(Xpp, F, _outside(lam, Xpp)), index, Xp=Xp)
                except AssertionError as exc:
                    chk("refine_two_sided", False, index, Xp=Xp, error=str(exc))
                break

    if K.successor and iAF:
        for Y in mids:
            if O.le_star_star(Y, F):
                chk("successor_i_descends_literal", O.is_i(A, Y), index, Y=Y)
                if K.scl(Y, F) == F:
                    chk("successor_i_descends", O.is_i(A, Y), index, Y=Y)


def _run_chunk(args) -> Tally:
    seed, lo, hi, max_new, alpha = args
    tally = Tally()
    for idx in range(lo, hi):
        S, base = random_instance(seed, idx, max_new)
        rng = np.random.default_rng(np.random.SeedSequence([seed, idx, 1]))
        check_instance(S, base, alpha, idx, rng, tally)
    return tally


def run_verify(instances: int = 500, seed: int = 0, max_new: int = 5, alpha: Alpha = DEFAULT_ALPHA,
               jobs: int = 1) -> Tally:
    chunk = max(1, -(-instances // max(1, jobs * 4)))
    tasks = [(seed, lo, min(lo + chunk, instances), max_new, alpha) for lo in range(0, instances, chunk)]
    tally = Tally()
    if jobs <= 1 or len(tasks) <= 1:
        parts = map(_run_chunk, tasks)
        for t in parts:
            tally.merge(t)
    else:
        with ProcessPoolExecutor(max_workers=jobs, mp_context=_SPAWN) as ex:
            for t in ex.map(_run_chunk, tasks):
                tally.merge(t)
    tally.violations.sort(key=lambda v: (v["instance"], v["property"]))
    return tally


def report(tally: Tally, instances: int, seed: int, max_new: int, alpha: Alpha) -> dict:
    return {
        "schema": 1,
        "instances": instances,
        "seed": seed,
        "max_new": max_new,
        "alpha": str(alpha),
        "checks": {name: tally.checks.get(name, 0) for name in PROPERTIES},
        "total_checks": tally.total,
        "violation_count": len(tally.violations),
        "violations": tally.violations[:50],
    }


def summary_line(tally: Tally) -> str:
    return f"{len(tally.violations)} violations / {tally.total} checks"
