"""Tagged pairs ``(A, B, lambda)`` and their exact weights.

``v`` counts the blocks of ``lambda``; ``e`` counts the edges of ``B`` that
lie neither inside ``A`` nor inside a single block; ``w = v - alpha*e`` is an
exact rational.  All sign tests compare integers ``v*q`` and ``e*p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import CapExceeded, GuardRejected, InvalidInput, PreconditionError
from .structures import Pair, Structure

PARTITION_CAP = 8


@dataclass(frozen=True)
class Alpha:
    """The exponent ``alpha`` as an exact rational in (0, 1).

    The guard rejects any value equal to ``v/e`` with ``1 <= v <= guard_v_max``
    and ``1 <= e <= guard_e_max``, so no weight built from at most
    ``guard_v_max`` blocks can vanish.  :meth:`sign` re-checks dynamically and
    raises if a zero weight is ever reached.
    """

    value: Fraction
    guard_v_max: int = 6
    guard_e_max: int = 64

    def __post_init__(self):
        value = Fraction(self.value)
        object.__setattr__(self, "value", value)
        if not 0 < value < 1:
            raise GuardRejected(f"alpha must lie in (0,1), got {value}")
        p, q = value.numerator, value.denominator
        if p <= self.guard_v_max and q <= self.guard_e_max:
            raise GuardRejected(
                f"alpha={value} equals v/e with v={p}<={self.guard_v_max}, e={q}<={self.guard_e_max}")

    @classmethod
    def parse(cls, text: str, **guard) -> "Alpha":
        try:
            value = Fraction(text.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"cannot parse alpha {text!r}; expected p/q") from exc
        return cls(value, **guard)

    @property
    def p(self) -> int:
        return self.value.numerator

    @property
    def q(self) -> int:
        return self.value.denominator

    def weight(self, v: int, e: int) -> Fraction:
        return v - self.value * e

    def sign(self, v: int, e: int) -> int:
        d = v * self.q - e * self.p
        if d == 0 and (v or e):
            raise GuardRejected(f"zero weight reached with v={v}, e={e} at alpha={self.value}")
        return (d > 0) - (d < 0)

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


DEFAULT_ALPHA = Alpha(Fraction(7, 10))


@dataclass(frozen=True)
class Partition:
    """Blocks of an equivalence relation, sorted by least element."""

    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        blocks = tuple(sorted((frozenset(b) for b in self.blocks), key=min))
        object.__setattr__(self, "blocks", blocks)
        if any(not b for b in blocks):
            raise InvalidInput("empty block")
        seen: set[int] = set()
        for b in blocks:
            if seen & b:
                raise InvalidInput("blocks overlap")
            seen |= b

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]]) -> "Partition":
        return cls(tuple(frozenset(b) for b in blocks))

    @classmethod
    def discrete(cls, ground: Iterable[int]) -> "Partition":
        return cls(tuple(frozenset([x]) for x in ground))

    @classmethod
    def one_block(cls, ground: Iterable[int]) -> "Partition":
        g = frozenset(ground)
        return cls((g,) if g else ())

    @property
    def ground(self) -> frozenset[int]:
        return frozenset().union(*self.blocks)

    def restrict(self, S: Iterable[int]) -> "Partition":
        S = frozenset(S)
        return Partition(tuple(b & S for b in self.blocks if b & S))

    def closure_of(self, S: Iterable[int]) -> frozenset[int]:
        """Union of the blocks meeting ``S``."""
        S = frozenset(S)
        return frozenset().union(*(b for b in self.blocks if b & S))

    def as_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.blocks]

    def __len__(self) -> int:
        return len(self.blocks)


@dataclass(frozen=True)
class WeightBreakdown:
    v: int
    e: int
    w: Fraction


def _rgs(n: int) -> Iterator[list[int]]:
    """Restricted growth strings of length n in lexicographic order."""
    if n == 0:
        yield []
        return
    a = [0] * n
    m = [0] * n  # m[i] = max(a[:i+1])
    while True:
        yield list(a)
        i = n - 1
        while i > 0 and a[i] == m[i - 1] + 1:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m[i] = max(m[i - 1], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            m[j] = m[i]


def enumerate_partitions(S: Iterable[int], constraint: Sequence[tuple[int, int]] | None = None,
                         cap: int = PARTITION_CAP) -> Iterator[Partition]:
    """Every set partition of ``S`` once, in restricted-growth-string order.

    ``constraint`` pairs must end up in a common block.
    """
    elems = sorted(set(S))
    if len(elems) > cap:
        raise CapExceeded(f"pattern too large: {len(elems)} new vertices exceeds cap {cap}")
    pos = {x: k for k, x in enumerate(elems)}
    pairs = [(pos[a], pos[b]) for a, b in constraint or () if a in pos and b in pos]
    for rgs in _rgs(len(elems)):
        if any(rgs[i] != rgs[j] for i, j in pairs):
            continue
        blocks: dict[int, list[int]] = {}
        for x, label in zip(elems, rgs):
            blocks.setdefault(label, []).append(x)
        yield Partition(tuple(frozenset(b) for b in blocks.values()))


def is_lambda_closed(X: Iterable[int], lam: Partition) -> bool:
    """Every block meeting ``X`` lies inside ``X`` (vertices outside the
    partition's ground set are ignored, as base vertices are)."""
    X = frozenset(X)
    return all(b <= X for b in lam.blocks if b & X)


# ---------------------------------------------------------------------------
# bitmask kernel


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Kernel:
    """Bitmask view of a small structure used by every weight computation.

    Local index ``k`` stands for vertex ``k+1``.  Caches are per instance; use
    :func:`kernel_for` to share instances across calls.
    """

    def __init__(self, structure: Structure, alpha: Alpha, cap: int = PARTITION_CAP):
        self.structure = structure
        self.alpha = alpha
        self.cap = cap
        n = structure.size
        self.n = n
        self.full = (1 << n) - 1
        adj = [0] * n
        for i, j in structure.edges.tolist():
            adj[i - 1] |= 1 << (j - 1)
            adj[j - 1] |= 1 << (i - 1)
        self.adj = adj
        self.successor = structure.succ is not None
        sadj = [0] * n
        for x, y in structure.succ or ():
            sadj[x - 1] |= 1 << (y - 1)
            sadj[y - 1] |= 1 << (x - 1)
        self.sadj = sadj
        self._edges_in: dict[int, int] = {}
        self._parts: dict[int, tuple[tuple[int, ...], ...]] = {}
        self.memo: dict = {}

    # conversions
    def mask(self, vertices: Iterable[int]) -> int:
        m = 0
        for v in vertices:
            if not 1 <= v <= self.n:
                raise InvalidInput(f"vertex {v} out of range")
            m |= 1 << (v - 1)
        return m

    def verts(self, mask: int) -> frozenset[int]:
        return frozenset(k + 1 for k in bits(mask))

    def sorted_verts(self, mask: int) -> tuple[int, ...]:
        return tuple(k + 1 for k in bits(mask))

    # structure queries
    def edges_in(self, mask: int) -> int:
        got = self._edges_in.get(mask)
        if got is None:
            adj = self.adj
            got = sum((adj[k] & mask).bit_count() for k in bits(mask)) // 2
            self._edges_in[mask] = got
        return got

    def s_boundary(self, X: int, Y: int) -> int:
        """Vertices of ``Y - X`` that are S-adjacent to ``X``."""
        out = 0
        for k in bits(X):
            out |= self.sadj[k]
        return out & Y & ~X

    def scl(self, X: int, Y: int) -> int:
        cur = X
        while True:
            nxt = cur | self.s_boundary(cur, Y)
            if nxt == cur:
                return cur
            cur = nxt

    def le_star(self, X: int, Y: int) -> bool:
        if X & ~Y:
            return False
        return not self.successor or self.s_boundary(X, Y) == 0

    def atoms(self, D: int) -> list[int]:
        """S-components inside ``D`` (singletons in plain mode)."""
        out = []
        rest = D
        while rest:
            low = rest & -rest
            comp = low
            if self.successor:
                frontier = low
                while frontier:
                    grow = 0
                    for k in bits(frontier):
                        grow |= self.sadj[k]
                    frontier = grow & D & ~comp
                    comp |= frontier
            out.append(comp)
            rest &= ~comp
        return out

    def partitions(self, D: int) -> tuple[tuple[int, ...], ...]:
        """All tag partitions of ``D`` as tuples of block masks.

        In successor mode blocks are unions of S-components, so every S-pair
        with an endpoint in ``D`` stays inside one block.
        """
        got = self._parts.get(D)
        if got is not None:
            return got
        atoms = self.atoms(D)
        if D.bit_count() > self.cap:
            raise CapExceeded(f"pattern too large: {D.bit_count()} new vertices exceeds cap {self.cap}")
        out = []
        for rgs in _rgs(len(atoms)):
            blocks: dict[int, int] = {}
            for atom, label in zip(atoms, rgs):
                blocks[label] = blocks.get(label, 0) | atom
            out.append(tuple(blocks.values()))
        got = tuple(out)
        self._parts[D] = got
        return got

    # the one edge-classification routine
    def long_edges(self, X: int, Y: int, blocks: Sequence[int]) -> int:
        """Edges of ``Y`` not inside ``X`` and not inside any block.

        ``blocks`` must partition ``Y - X``.
        """
        e = self.edges_in(Y) - self.edges_in(X)
        for b in blocks:
            e -= self.edges_in(b)
        return e

    def ve(self, X: int, Y: int, blocks: Sequence[int]) -> tuple[int, int]:
        return len(blocks), self.long_edges(X, Y, blocks)

    def sign(self, X: int, Y: int, blocks: Sequence[int]) -> int:
        v, e = self.ve(X, Y, blocks)
        return self.alpha.sign(v, e)

    def weight(self, X: int, Y: int, blocks: Sequence[int]) -> Fraction:
        v, e = self.ve(X, Y, blocks)
        return self.alpha.weight(v, e)

    @staticmethod
    def closed_unions(blocks: Sequence[int]) -> Iterator[tuple[int, tuple[int, ...]]]:
        """Every union of blocks with its block list (empty union first)."""
        nb = len(blocks)
        for sel in range(1 << nb):
            chosen = tuple(blocks[k] for k in range(nb) if sel >> k & 1)
            m = 0
            for b in chosen:
                m |= b
            yield m, chosen

    def in_xi(self, X: int, blocks: Sequence[int]) -> bool:
        """Every nonempty closed ``C`` has ``w(X, X|C) > 0``."""
        for C, sub in self.closed_unions(blocks):
            if C and self.sign(X, X | C, sub) <= 0:
                return False
        return True

    def xi(self, X: int, Y: int) -> list[tuple[int, ...]]:
        key = ("xi", X, Y)
        got = self.memo.get(key)
        if got is None:
            got = [lam for lam in self.partitions(Y & ~X) if self.in_xi(X, lam)]
            self.memo[key] = got
        return got

    def xi_value(self, X: int, Y: int) -> Fraction | None:
        cands = self.xi(X, Y)
        if not cands:
            return None
        return max(self.weight(X, Y, lam) for lam in cands)

    # conversions of partitions
    def blocks_of(self, lam: Partition) -> tuple[int, ...]:
        return tuple(self.mask(b) for b in lam.blocks)

    def partition_of(self, blocks: Sequence[int]) -> Partition:
        return Partition(tuple(self.verts(b) for b in blocks))


@lru_cache(maxsize=4096)
def kernel_for(structure: Structure, alpha: Alpha = DEFAULT_ALPHA, cap: int = PARTITION_CAP) -> Kernel:
    return Kernel(structure, alpha, cap)


# ---------------------------------------------------------------------------
# public operations on Pair objects


def check_tag(pair: Pair, lam: Partition) -> None:
    """Raise unless ``(A, B, lam)`` is a valid tagged pair."""
    B, A = pair.ambient, pair.base
    if lam.ground != pair.new:
        raise InvalidInput("partition must cover exactly B minus A")
    if B.succ is not None:
        block_of = {x: k for k, b in enumerate(lam.blocks) for x in b}
        for x, y in B.succ:
            bx, by = block_of.get(x), block_of.get(y)
            if (bx is None) != (by is None) or bx != by:
                raise InvalidInput(f"succ pair ({x},{y}) is not inside one block")


def weight(pair: Pair, lam: Partition, alpha: Alpha = DEFAULT_ALPHA) -> WeightBreakdown:
    check_tag(pair, lam)
    K = kernel_for(pair.ambient, alpha)
    A = K.mask(pair.base)
    v, e = K.ve(A, K.full, K.blocks_of(lam))
    if v or e:
        alpha.sign(v, e)
    return WeightBreakdown(v, e, alpha.weight(v, e))


def weight_relative(pair: Pair, lam: Partition, C: Iterable[int], D: Iterable[int] | None = None,
                    alpha: Alpha = DEFAULT_ALPHA) -> WeightBreakdown:
    """Weight of ``(A|C, A|D, lam restricted to D - C)``.

    ``C`` must be lambda-closed; ``D`` defaults to all of ``B - A``.
    """
    check_tag(pair, lam)
    C = frozenset(C)
    D = pair.new if D is None else frozenset(D)
    if not C <= D <= pair.new:
        raise PreconditionError("need C <= D <= B - A")
    if not is_lambda_closed(C, lam):
        raise PreconditionError("C is not lambda-closed")
    K = kernel_for(pair.ambient, alpha)
    A = K.mask(pair.base)
    X = A | K.mask(C)
    Y = A | K.mask(D)
    blocks = K.blocks_of(lam.restrict(D - C))
    v, e = K.ve(X, Y, blocks)
    if v or e:
        alpha.sign(v, e)
    return WeightBreakdown(v, e, alpha.weight(v, e))


def _require_le_star(pair: Pair, K: Kernel) -> tuple[int, int]:
    A = K.mask(pair.base)
    if not K.le_star(A, K.full):
        raise PreconditionError("base is not <=* ambient (an S-pair leaves the base)")
    return A, K.full


def xi_set(pair: Pair, alpha: Alpha = DEFAULT_ALPHA) -> list[Partition]:
    K = kernel_for(pair.ambient, alpha)
    A, B = _require_le_star(pair, K)
    return [K.partition_of(lam) for lam in K.xi(A, B)]


def xi_value(pair: Pair, alpha: Alpha = DEFAULT_ALPHA) -> Fraction | None:
    """Largest weight over the partitions in ``xi_set``; ``None`` if none exist."""
    K = kernel_for(pair.ambient, alpha)
    A, B = _require_le_star(pair, K)
    return K.xi_value(A, B)


def format_fraction(x: Fraction | None) -> str:
    if x is None:
        return "undefined"
    return f"{x.numerator}/{x.denominator} ({float(x):.6f})"


def zeta_value(pair: Pair, alpha: Alpha = DEFAULT_ALPHA) -> Fraction | None:
    """Best worst-case weight: max over ``lam`` in ``xi_set`` of the least
    ``w(A, A|C)`` over nonempty lambda-closed ``C``."""
    K = kernel_for(pair.ambient, alpha)
    A, B = _require_le_star(pair, K)
    best = None
    for lam in K.xi(A, B):
        low = min((K.weight(A, A | C, sub) for C, sub in K.closed_unions(lam) if C), default=None)
        if low is not None and (best is None or low > best):
            best = low
    return best
