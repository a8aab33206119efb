"""Backtracking search for extensions of a base map and disjoint families.

An extension of ``f: A -> M`` along a pattern ``(A, B)`` is an injective
``g`` on ``B`` that agrees with ``f`` on ``A``.  ``positive`` mode only asks
that edges (and S-pairs) of ``B`` outside ``A`` map to edges (S-pairs);
``induced`` mode asks for an induced copy preserving non-edges and non-S-pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Mapping, Sequence

import numpy as np

from ..errors import InvalidInput
from ..structures import Pair, Structure

NODE_CAP = 10**7
MODES = ("induced", "positive")


@dataclass(frozen=True)
class CountResult:
    count: int
    nodes: int
    censored: bool


@dataclass(frozen=True)
class _Slot:
    vertex: int
    nbrs: tuple[int, ...]        # earlier slots adjacent in B
    non_nbrs: tuple[int, ...]    # earlier slots non-adjacent in B
    s_out: tuple[int, ...]       # earlier slots u with S(b, u)
    s_in: tuple[int, ...]        # earlier slots u with S(u, b)
    s_none: tuple[int, ...]      # earlier slots with no S either way


def check_base_map(M: Structure, pair: Pair, f: Mapping[int, int], mode: str) -> None:
    if mode not in MODES:
        raise InvalidInput(f"unknown mode {mode!r}")
    if set(f) != set(pair.base):
        raise InvalidInput("base map must be defined exactly on A")
    imgs = list(f.values())
    if len(set(imgs)) != len(imgs) or any(not 1 <= y <= M.size for y in imgs):
        raise InvalidInput("base map must be injective into the host")
    if M.succ is not None and pair.ambient.succ is None:
        raise InvalidInput("successor host needs a successor pattern")
    if mode == "induced":
        B = pair.ambient
        base = sorted(pair.base)
        for i, a in enumerate(base):
            for b in base[i + 1:]:
                if B.has_edge(a, b) != M.has_edge(f[a], f[b]):
                    raise InvalidInput("base map is not an induced embedding of A")
                if M.succ is not None:
                    if B.has_succ(a, b) != M.has_succ(f[a], f[b]) or B.has_succ(b, a) != M.has_succ(f[b], f[a]):
                        raise InvalidInput("base map does not preserve S on A")


class ExtensionSearch:
    """Enumerates extensions of ``f`` in a fixed deterministic order.

    ``forbidden`` vertices are never used as new images; ``window`` restricts
    new images to ``[lo, hi)``.  Iteration consults ``blocked`` (a live set)
    on every candidate, so a greedy caller can grow it between yields.
    """

    def __init__(self, M: Structure, pair: Pair, f: Mapping[int, int], mode: str = "induced",
                 forbidden=frozenset(), window: tuple[int, int] | None = None, node_cap: int = NODE_CAP):
        check_base_map(M, pair, f, mode)
        self.M = M
        self.pair = pair
        self.f = dict(f)
        self.mode = mode
        self.forbidden = frozenset(forbidden)
        self.window = window
        self.node_cap = node_cap
        self.nodes = 0
        self.censored = False
        self.use_s = M.succ is not None
        self._plan()

    def _plan(self):
        B = self.pair.ambient
        base = sorted(self.pair.base)
        order = list(base)
        rest = sorted(self.pair.new)
        placed = set(base)
        while rest:
            # prefer S-anchored vertices, then most placed neighbours, then B-degree
            def score(b):
                s_anch = any(u in placed for u in B.s_neighbors(b)) if B.succ is not None else False
                return (s_anch, len(B.neighbors(b) & placed), B.degree(b), -b)
            b = max(rest, key=score)
            rest.remove(b)
            order.append(b)
            placed.add(b)
        self.order = order
        self.n_base = len(base)
        pos = {v: k for k, v in enumerate(order)}
        slots = []
        for t in range(self.n_base, len(order)):
            b = order[t]
            earlier = range(t)
            nb = tuple(s for s in earlier if B.has_edge(b, order[s]))
            nn = tuple(s for s in earlier if not B.has_edge(b, order[s]))
            so = si = sn = ()
            if B.succ is not None:
                so = tuple(s for s in earlier if B.has_succ(b, order[s]))
                si = tuple(s for s in earlier if B.has_succ(order[s], b))
                sn = tuple(s for s in earlier if s not in so and s not in si)
            slots.append(_Slot(b, nb, nn, so, si, sn))
        self.slots = slots
        self.pos = pos

    # candidate generation ----------------------------------------------------
    def _candidates(self, slot: _Slot, img: list[int]):
        M = self.M
        if self.use_s and slot.s_out:
            y = M.succ_prev.get(img[slot.s_out[0]])
            return () if y is None else (y,)
        if self.use_s and slot.s_in:
            y = M.succ_next.get(img[slot.s_in[0]])
            return () if y is None else (y,)
        if slot.nbrs:
            anchor = min(slot.nbrs, key=lambda s: M.degree(img[s]))
            arr = M.sorted_neighbors(img[anchor])
            if self.window is not None:
                lo, hi = self.window
                a, b = np.searchsorted(arr, [lo, hi])
                arr = arr[a:b]
            return arr.tolist()
        if self.window is not None:
            return range(self.window[0], self.window[1])
        return range(1, M.size + 1)

    def _ok(self, c: int, slot: _Slot, img: list[int], used: set, blocked) -> bool:
        if c in used or c in self.forbidden or (blocked is not None and c in blocked):
            return False
        if self.window is not None and not self.window[0] <= c < self.window[1]:
            return False
        M = self.M
        nb = M.neighbors(c)
        for s in slot.nbrs:
            if img[s] not in nb:
                return False
        if self.mode == "induced":
            for s in slot.non_nbrs:
                if img[s] in nb:
                    return False
        if self.use_s:
            nxt = M.succ_next.get(c)
            prv = M.succ_prev.get(c)
            for s in slot.s_out:
                if nxt != img[s]:
                    return False
            for s in slot.s_in:
                if prv != img[s]:
                    return False
            if self.mode == "induced":
                for s in slot.s_none:
                    if nxt == img[s] or prv == img[s]:
                        return False
        return True

    def _initial(self):
        img = [self.f[a] for a in self.order[: self.n_base]]
        return img, set(img)

    def iter_images(self, blocked=None) -> Iterator[tuple[int, ...]]:
        """Yield the images of the new vertices (in ``self.order`` order)."""
        img, used = self._initial()
        slots = self.slots
        depth_total = len(slots)
        if depth_total == 0:
            yield ()
            return

        def rec(d):
            slot = slots[d]
            for c in self._candidates(slot, img):
                if not self._ok(c, slot, img, used, blocked):
                    continue
                self.nodes += 1
                if self.nodes > self.node_cap:
                    self.censored = True
                    return
                if d + 1 == depth_total:
                    yield tuple(img[self.n_base:]) + (c,)
                else:
                    img.append(c)
                    used.add(c)
                    yield from rec(d + 1)
                    img.pop()
                    used.discard(c)
                    if self.censored:
                        return
                    if blocked and any(img[t] in blocked for t in range(self.n_base, len(img))):
                        return  # an ancestor got taken by the caller

        yield from rec(0)

    def count(self) -> CountResult:
        img, used = self._initial()
        slots = self.slots
        if not slots:
            return CountResult(1, 0, False)
        last = len(slots) - 1
        total = 0

        def rec(d):
            nonlocal total
            slot = slots[d]
            for c in self._candidates(slot, img):
                if not self._ok(c, slot, img, used, None):
                    continue
                self.nodes += 1
                if self.nodes > self.node_cap:
                    self.censored = True
                    return
                if d == last:
                    total += 1
                else:
                    img.append(c)
                    used.add(c)
                    rec(d + 1)
                    img.pop()
                    used.discard(c)
                    if self.censored:
                        return

        rec(0)
        return CountResult(total, self.nodes, self.censored)

    def as_map(self, images: Sequence[int]) -> dict[int, int]:
        g = dict(self.f)
        for slot, c in zip(self.slots, images):
            g[slot.vertex] = c
        return g


# ---------------------------------------------------------------------------


def enumerate_extensions(M: Structure, f: Mapping[int, int], pattern: Pair, mode: str = "induced",
                         *, node_cap: int = NODE_CAP, as_list: bool = False):
    """Exact extension count (``CountResult``), or the list of maps with ``as_list``."""
    search = ExtensionSearch(M, pattern, f, mode, node_cap=node_cap)
    if as_list:
        return [search.as_map(im) for im in search.iter_images()]
    return search.count()


def avoiding_extensions(M: Structure, f: Mapping[int, int], pattern: Pair, X, mode: str = "induced",
                        *, node_cap: int = NODE_CAP) -> CountResult:
    """Extensions whose new images avoid ``X``."""
    search = ExtensionSearch(M, pattern, f, mode, forbidden=frozenset(X), node_cap=node_cap)
    return search.count()


@dataclass(frozen=True)
class Family:
    members: tuple[dict, ...]
    censored: bool

    def __len__(self) -> int:
        return len(self.members)


def _greedy(search: ExtensionSearch, limit: int | None = None) -> Family:
    blocked: set[int] = set()
    members = []
    for images in search.iter_images(blocked):
        if blocked.intersection(images):
            continue
        members.append(search.as_map(images))
        blocked.update(images)
        if limit is not None and len(members) >= limit:
            break
        if not images:  # B = A: the single trivial extension
            break
    return Family(tuple(members), search.censored)


def greedy_disjoint_family(M: Structure, f: Mapping[int, int], pattern: Pair, mode: str = "positive",
                           *, node_cap: int = NODE_CAP) -> Family:
    """Maximal family (first-found order) whose new images are pairwise disjoint."""
    return _greedy(ExtensionSearch(M, pattern, f, mode, node_cap=node_cap))


def near_set(n: int, images, eps: float) -> frozenset[int]:
    """Vertices at distance below ``n**eps`` from some image."""
    r = n ** eps
    reach = math.ceil(r) - 1  # |v - y| <= reach  <=>  |v - y| < r
    out = set()
    for y in images:
        out.update(range(max(1, y - reach), min(n, y + reach) + 1))
    return frozenset(out)


def fact23_bound(n: int, base_size: int, eps: float, k: int) -> float:
    return 2 * base_size * n ** eps + (k - 1)


@dataclass(frozen=True)
class FarResult:
    exists: bool
    greedy: int
    exact: bool
    censored: bool
    candidates: int


def _pack_at_least(sets: list[frozenset[int]], k: int, cap: int = 10**6) -> tuple[bool, bool]:
    """Whether ``k`` pairwise disjoint members exist; returns (answer, censored)."""
    sets = sorted(set(sets), key=lambda s: (len(s), sorted(s)))
    nodes = 0

    def rec(start: int, chosen: int, used: frozenset[int]) -> bool | None:
        nonlocal nodes
        if chosen >= k:
            return True
        avail = [i for i in range(start, len(sets)) if not sets[i] & used]
        if chosen + len(avail) < k:
            return False
        for idx, i in enumerate(avail):
            nodes += 1
            if nodes > cap:
                return None
            if chosen + len(avail) - idx < k:
                return False
            got = rec(i + 1, chosen + 1, used | sets[i])
            if got is None or got:
                return got
        return False

    got = rec(0, 0, frozenset())
    return (bool(got), got is None)


def far_tuple_exists(M: Structure, f: Mapping[int, int], pattern: Pair, eps: float, k: int,
                     mode: str = "positive", *, node_cap: int = NODE_CAP) -> FarResult:
    """Whether ``k`` pairwise disjoint extensions exist whose new images all lie
    at distance at least ``n**eps`` from every base image.

    Greedy search first; if it stops short, the far candidates are packed
    exactly, so a negative answer is always exact unless ``censored``.
    """
    if k <= 0:
        return FarResult(True, 0, True, False, 0)
    near = near_set(M.size, f.values(), eps)
    search = ExtensionSearch(M, pattern, f, mode, forbidden=near, node_cap=node_cap)
    fam = _greedy(search, limit=k)
    if len(fam) >= k:
        return FarResult(True, len(fam), False, False, len(fam))
    if fam.censored:
        return FarResult(False, len(fam), False, True, len(fam))
    if len(pattern.new) <= 1:
        # singleton images are disjoint whenever distinct: greedy is exact
        return FarResult(False, len(fam), True, False, len(fam))
    full = ExtensionSearch(M, pattern, f, mode, forbidden=near, node_cap=node_cap)
    sets = [frozenset(im) for im in full.iter_images()]
    if full.censored:
        return FarResult(False, len(fam), False, True, len(sets))
    ans, cens = _pack_at_least(sets, k)
    return FarResult(ans, len(fam), not cens, cens, len(sets))


def windowed_disjoint_family(M: Structure, f: Mapping[int, int], pattern: Pair, window: tuple[int, int],
                             mode: str = "positive", *, node_cap: int = NODE_CAP) -> Family:
    """Greedy disjoint family with all new images in ``[lo, hi)``."""
    lo, hi = window
    if not 1 <= lo <= hi <= M.size + 1:
        raise InvalidInput(f"window [{lo},{hi}) out of range 1..{M.size}")
    return _greedy(ExtensionSearch(M, pattern, f, mode, window=(lo, hi), node_cap=node_cap))


def window_near(n: int, f: Mapping[int, int], eps: float) -> tuple[int, int]:
    """A window of width ``ceil(n**(1-eps))`` right after the largest base
    image, mirrored to the left of the smallest one when it does not fit."""
    width = math.ceil(n ** (1 - eps))
    imgs = sorted(f.values()) or [0]
    lo = imgs[-1] + 1
    if lo + width <= n + 1:
        return lo, lo + width
    hi = max(imgs[0], 1)
    lo = max(1, hi - width)
    return lo, hi


def exact_max_disjoint(sets: Sequence[frozenset[int]]) -> int:
    """Maximum number of pairwise disjoint sets (exponential; tiny inputs only)."""
    sets = sorted(set(sets), key=lambda s: sorted(s))
    best = 0

    def rec(i: int, used: frozenset[int], chosen: int):
        nonlocal best
        if chosen + (len(sets) - i) <= best:
            return
        if i == len(sets):
            best = max(best, chosen)
            return
        if not sets[i] & used:
            rec(i + 1, used | sets[i], chosen + 1)
        rec(i + 1, used, chosen)

    rec(0, frozenset(), 0)
    return best


def sample_placements(M: Structure, pattern: Pair, rng: np.random.Generator, count: int,
                      mode: str = "positive", min_gap: int = 1, max_tries: int = 1000) -> list[dict[int, int]]:
    """Uniform order-respecting base maps with mutual gaps at least ``min_gap``
    that embed ``A`` in the given mode."""
    base = sorted(pattern.base)
    n = M.size
    s = len(base)
    if not base:
        return [{} for _ in range(count)]
    span = n - (s - 1) * (min_gap - 1)
    if span < s:
        raise InvalidInput("host too small for the requested placement gap")
    out = []
    for _ in range(count):
        for _attempt in range(max_tries):
            pts = np.sort(rng.choice(span, size=s, replace=False)) + 1
            imgs = [int(p) + k * (min_gap - 1) for k, p in enumerate(pts)]
            f = dict(zip(base, imgs))
            try:
                check_base_map(M, pattern, f, mode)
            except InvalidInput:
                continue
            out.append(f)
            break
        else:
            raise InvalidInput("could not find a valid base placement")
    return out


def boundary_placements(M: Structure, pattern: Pair, mode: str = "positive", min_gap: int = 1) -> dict[str, dict[int, int]]:
    """Base maps packed against the left and right ends of ``[1, n]``
    (the first valid gap at least ``min_gap``)."""
    base = sorted(pattern.base)
    n = M.size
    out = {}
    if not base:
        return out
    s = len(base)
    for side in ("left", "right"):
        for gap in range(min_gap, max(min_gap, n // max(s, 1)) + 1):
            if side == "left":
                imgs = [1 + k * gap for k in range(s)]
            else:
                imgs = [n - (s - 1 - k) * gap for k in range(s)]
            if imgs[0] < 1 or imgs[-1] > n:
                break
            f = dict(zip(base, imgs))
            try:
                check_base_map(M, pattern, f, mode)
            except InvalidInput:
                continue
            out[f"boundary-{side}"] = f
            break
    return out
