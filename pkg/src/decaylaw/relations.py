"""Decision procedures for the starred relations between ``A`` and ``B``.

Everything is exhaustive within the partition cap: intermediate bases range
over ``A | D`` for every ``D`` inside ``B - A`` and partitions over all tags.
The mask-level :class:`Oracle` works on subsets of one ambient structure, so
sub-pairs never need relabelling; public functions take :class:`Pair` objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

from .errors import InvalidInput, PreconditionError
from .structures import Pair, Structure
from .weights import DEFAULT_ALPHA, PARTITION_CAP, Alpha, Kernel, Partition, bits, check_tag

RELATIONS = ("c", "i", "s", "a", "pr", "star", "star_star")


@dataclass(frozen=True)
class RelationVerdict:
    relation: str
    verdict: bool
    aprime: frozenset[int] | None = None
    blocks: Partition | None = None
    extra: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        witness = None
        if self.aprime is not None or self.blocks is not None:
            witness = {
                "aprime": sorted(self.aprime) if self.aprime is not None else None,
                "blocks": self.blocks.as_lists() if self.blocks is not None else None,
            }
            witness.update(self.extra)
        elif self.extra:
            witness = dict(self.extra)
        return {"relation": self.relation, "verdict": self.verdict, "witness": witness}


def submasks(D: int) -> Iterator[int]:
    """All submasks of ``D``, ascending as integers."""
    sub = 0
    while True:
        yield sub
        if sub == D:
            return
        sub = (sub - D) & D


def lex_key(mask: int) -> tuple:
    """Largest first, then the lexicographically smallest sorted vertex list."""
    return (-mask.bit_count(), tuple(bits(mask)))


class Oracle:
    """Memoised relation deciders on subsets of one structure."""

    def __init__(self, kernel: Kernel):
        self.K = kernel
        self._memo: dict = {}

    # -- basics --------------------------------------------------------------
    def le_star(self, X: int, Y: int) -> bool:
        return self.K.le_star(X, Y)

    def lt_star(self, X: int, Y: int) -> bool:
        return X != Y and self.K.le_star(X, Y)

    def intermediates(self, X: int, Y: int) -> Iterator[int]:
        """Every ``X'`` with ``X <=* X' <* Y``."""
        for D in submasks(Y & ~X):
            Xp = X | D
            if Xp != Y and self.K.le_star(X, Xp) and self.K.le_star(Xp, Y):
                yield Xp

    # -- c -------------------------------------------------------------------
    def c_witness(self, X: int, Y: int):
        """``None`` when ``X <*_c Y``; otherwise a tag with positive weight
        (or ``()`` when ``X <* Y`` itself fails)."""
        key = ("c", X, Y)
        if key in self._memo:
            return self._memo[key]
        out = ()
        if self.lt_star(X, Y):
            out = None
            for lam in self.K.partitions(Y & ~X):
                if self.K.sign(X, Y, lam) > 0:
                    out = lam
                    break
        self._memo[key] = out
        return out

    def is_c(self, X: int, Y: int) -> bool:
        return self.c_witness(X, Y) is None

    # -- i -------------------------------------------------------------------
    def i_witness(self, X: int, Y: int):
        """``None`` when ``X <=*_i Y``; else ``(X', lam)`` with ``X'`` an
        intermediate base and ``lam`` a tag of positive weight over it."""
        key = ("i", X, Y)
        if key in self._memo:
            return self._memo[key]
        out = None
        if not self.le_star(X, Y):
            out = (None, None)
        else:
            for Xp in self.intermediates(X, Y):
                lam = self.c_witness(Xp, Y)
                if lam is not None:
                    out = (Xp, lam)
                    break
        self._memo[key] = out
        return out

    def is_i(self, X: int, Y: int) -> bool:
        return self.i_witness(X, Y) is None

    def i_alt_ii(self, X: int, Y: int) -> bool:
        """No intermediate ``X'`` and tag with ``w(X', Y) > 0``."""
        K = self.K
        for Xp in self.intermediates(X, Y):
            for lam in K.partitions(Y & ~Xp):
                if K.sign(Xp, Y, lam) > 0:
                    return False
        return True

    def star1(self, Xp: int, Y: int, lam) -> bool:
        """Every proper nonempty closed ``C`` has ``w(X', X'|C) > 0`` and
        ``w(X'|C, Y) < 0``."""
        K = self.K
        full = Y & ~Xp
        for C, sub in K.closed_unions(lam):
            if C == 0 or C == full:
                continue
            rest = tuple(b for b in lam if not b & C)
            if K.sign(Xp, Xp | C, sub) <= 0 or K.sign(Xp | C, Y, rest) >= 0:
                return False
        return True

    def i_alt_iii(self, X: int, Y: int) -> bool:
        """No intermediate ``X'`` and tag with positive weight satisfying
        :meth:`star1`."""
        K = self.K
        for Xp in self.intermediates(X, Y):
            for lam in K.partitions(Y & ~Xp):
                if K.sign(Xp, Y, lam) > 0 and self.star1(Xp, Y, lam):
                    return False
        return True

    # -- s -------------------------------------------------------------------
    def is_s(self, X: int, Y: int) -> bool:
        key = ("s", X, Y)
        got = self._memo.get(key)
        if got is None:
            got = self.le_star(X, Y) and (X == Y or bool(self.K.xi(X, Y)))
            self._memo[key] = got
        return got

    def s_direct_witness(self, X: int, Y: int):
        """``None`` when no ``X'`` has ``X <*_i X' <=* Y``; else that ``X'``."""
        for D in submasks(Y & ~X):
            if not D:
                continue
            Xp = X | D
            if self.K.le_star(Xp, Y) and self.K.le_star(X, Xp) and self.is_i(X, Xp):
                return Xp
        return None

    def is_s_direct(self, X: int, Y: int) -> bool:
        return self.le_star(X, Y) and self.s_direct_witness(X, Y) is None

    # -- a, pr ---------------------------------------------------------------
    def is_a(self, X: int, Y: int) -> bool:
        return self.lt_star(X, Y) and not self.is_s(X, Y)

    def pr_witness(self, X: int, Y: int):
        """``None`` when ``X <*_pr Y``; else an intermediate ``C`` (or ``-1``
        when ``X <*_s Y`` fails outright)."""
        if not (X != Y and self.is_s(X, Y)):
            return -1
        for D in submasks(Y & ~X):
            C = X | D
            if C in (X, Y):
                continue
            if self.is_s(X, C) and self.is_s(C, Y):
                return C
        return None

    def is_pr(self, X: int, Y: int) -> bool:
        return self.pr_witness(X, Y) is None

    # -- constructions -------------------------------------------------------
    def decompose(self, X: int, Z: int) -> int:
        """Largest ``Y`` (lex tiebreak) with ``X <=*_i Y <=* Z``."""
        if not self.le_star(X, Z):
            raise PreconditionError("decompose needs A <=* C")
        cands = [X | D for D in submasks(Z & ~X)]
        cands.sort(key=lex_key)
        for Y in cands:
            if self.le_star(Y, Z) and self.le_star(X, Y) and self.is_i(X, Y):
                if not self.is_s(Y, Z):
                    raise AssertionError("decomposition is not <=*_s over the top")
                return Y
        raise AssertionError("no decomposition found")  # X itself always qualifies

    def refine(self, Xp: int, Y: int, lam) -> int:
        """Grow ``X'`` by the largest closed ``C'`` keeping ``w(X'|C', Y) > 0``."""
        K = self.K
        if not self.lt_star(Xp, Y):
            raise PreconditionError("refine needs A' <* B")
        if K.sign(Xp, Y, lam) <= 0:
            raise PreconditionError("refine needs w(A', B) > 0")
        best = None
        for C, _ in K.closed_unions(lam):
            rest = tuple(b for b in lam if not b & C)
            if rest and K.sign(Xp | C, Y, rest) > 0:
                if best is None or lex_key(C) < lex_key(best):
                    best = C
        Xpp = Xp | best
        rest = tuple(b for b in lam if not b & best)
        if not self.star1(Xpp, Y, rest):
            raise AssertionError("refined base violates the two-sided weight condition")
        return Xpp

    # -- successor ---------------------------------------------------------------
    def le_star_star(self, X: int, Y: int) -> bool:
        K = self.K
        if not K.successor:
            raise InvalidInput("<=** is defined for successor structures only")
        if X & ~Y:
            return False
        inner = set(K.atoms(X))
        for comp in K.atoms(Y):
            part = comp & X
            if part and part not in inner:
                return False
        scl = K.scl(X, Y)
        for k in bits(scl & ~X):
            if K.adj[k] & scl:
                return False
        return True


@lru_cache(maxsize=4096)
def oracle_for(structure: Structure, alpha: Alpha = DEFAULT_ALPHA, cap: int = PARTITION_CAP) -> Oracle:
    return Oracle(Kernel(structure, alpha, cap))


# ---------------------------------------------------------------------------
# Pair-level API


def _setup(pair: Pair, alpha: Alpha):
    O = oracle_for(pair.ambient, alpha)
    return O, O.K.mask(pair.base), O.K.full


def _need_le_star(O: Oracle, X: int, Y: int) -> None:
    if not O.le_star(X, Y):
        raise PreconditionError("base is not <=* ambient (an S-pair leaves the base)")


def le_star(pair: Pair) -> bool:
    O, X, Y = _setup(pair, DEFAULT_ALPHA)
    return O.le_star(X, Y)


def decide_c(pair: Pair, alpha: Alpha = DEFAULT_ALPHA) -> RelationVerdict:
    O, X, Y = _setup(pair, alpha)
    _need_le_star(O, X, Y)
    lam = O.c_witness(X, Y)
    if lam is None:
        return RelationVerdict("c", True)
    if lam == ():
        return RelationVerdict("c", False, extra={"reason": "A = B"})
    return RelationVerdict("c", False, O.K.verts(X), O.K.partition_of(lam))


def decide_i(pair: Pair, alpha: Alpha = DEFAULT_ALPHA, cross_check: bool = True) -> RelationVerdict:
    O, X, Y = _setup(pair, alpha)
    _need_le_star(O, X, Y)
    wit = O.i_witness(X, Y)
    verdict = wit is None
    if cross_check and not (verdict == O.i_alt_ii(X, Y) == O.i_alt_iii(X, Y)):
        raise AssertionError("characterisations of <=*_i disagree")
    if verdict:
        return RelationVerdict("i", True)
    Xp, lam = wit
    return RelationVerdict("i", False, O.K.verts(Xp), O.K.partition_of(lam))


def decide_s(pair: Pair, alpha: Alpha = DEFAULT_ALPHA, cross_check: bool = True) -> RelationVerdict:
    O, X, Y = _setup(pair, alpha)
    _need_le_star(O, X, Y)
    verdict = O.is_s(X, Y)
    if cross_check and verdict != O.is_s_direct(X, Y):
        raise AssertionError("fast and direct <=*_s disagree")
    if verdict:
        lam = O.K.xi(X, Y)
        blocks = O.K.partition_of(lam[0]) if lam else Partition(())
        return RelationVerdict("s", True, None, blocks)
    Xp = O.s_direct_witness(X, Y)
    return RelationVerdict("s", False, O.K.verts(Xp), None, extra={"kind": "i-stage"})


def decide_a(pair: Pair, alpha: Alpha = DEFAULT_ALPHA) -> RelationVerdict:
    O, X, Y = _setup(pair, alpha)
    _need_le_star(O, X, Y)
    verdict = O.is_a(X, Y)
    if verdict:
        return RelationVerdict("a", True, O.K.verts(O.s_direct_witness(X, Y)), None,
                               extra={"kind": "i-stage"})
    return RelationVerdict("a", False)


def decide_pr(pair: Pair, alpha: Alpha = DEFAULT_ALPHA) -> RelationVerdict:
    O, X, Y = _setup(pair, alpha)
    _need_le_star(O, X, Y)
    if X == Y:
        raise PreconditionError("<*_pr needs A != B")
    wit = O.pr_witness(X, Y)
    if wit is None:
        return RelationVerdict("pr", True)
    if wit == -1:
        return RelationVerdict("pr", False, extra={"reason": "not <*_s"})
    return RelationVerdict("pr", False, O.K.verts(wit), None, extra={"kind": "intermediate"})


def decide_star(pair: Pair) -> RelationVerdict:
    return RelationVerdict("star", le_star(pair))


def decide_star_star(pair: Pair) -> RelationVerdict:
    O, X, Y = _setup(pair, DEFAULT_ALPHA)
    return RelationVerdict("star_star", O.le_star_star(X, Y))


def decide(pair: Pair, relation: str, alpha: Alpha = DEFAULT_ALPHA) -> RelationVerdict:
    table = {"c": decide_c, "i": decide_i, "s": decide_s, "a": decide_a, "pr": decide_pr}
    if relation in table:
        return table[relation](pair, alpha)
    if relation == "star":
        return decide_star(pair)
    if relation == "star_star":
        return decide_star_star(pair)
    raise InvalidInput(f"unknown relation {relation!r}")


def decompose(pair: Pair, alpha: Alpha = DEFAULT_ALPHA) -> frozenset[int]:
    """``B`` with ``A <=*_i B <=*_s C`` where the pair is ``(A, C)``."""
    O, X, Z = _setup(pair, alpha)
    return O.K.verts(O.decompose(X, Z))


def refine_1_13(pair: Pair, lam: Partition, alpha: Alpha = DEFAULT_ALPHA) -> frozenset[int]:
    """Enlarge the base ``A'`` of a positive tagged pair until every proper
    closed piece is positive over it and negative towards ``B``."""
    check_tag(pair, lam)
    O, X, Y = _setup(pair, alpha)
    return O.K.verts(O.refine(X, Y, O.K.blocks_of(lam)))


def le_star_star(pair: Pair) -> bool:
    O, X, Y = _setup(pair, DEFAULT_ALPHA)
    return O.le_star_star(X, Y)
