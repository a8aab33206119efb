"""First-order sentences over ``R``, ``S`` and ``=``, evaluated by tensors.

Syntax is s-expressions::

    (exists x (exists y (and (S x y) (R x y))))

with ``forall``, ``and``, ``or``, ``not``, ``implies`` (alias ``->``), ``=``,
``R`` and ``S``.  A subformula is evaluated to a boolean array with one axis
per free variable (in order of first binding), so each quantifier is a single
``any``/``all`` reduction.  When a subformula would need more than
``budget`` cells the outermost free variable is fixed to each constant in turn.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import CapExceeded, InvalidInput
from ..structures import Structure

RANK_CAP = 3
N_BUDGET = {1: 10**7, 2: 20000, 3: 800}
CELL_BUDGET = 2 * 10**7

QUANTS = ("exists", "forall")
CONNECTIVES = ("and", "or", "not", "implies", "->")
ATOMS = ("R", "S", "=")


@dataclass(frozen=True)
class Node:
    op: str
    args: tuple  # variables (str) for atoms/quantifier binders, Nodes otherwise

    def __str__(self) -> str:
        inner = " ".join(str(a) for a in self.args)
        return f"({self.op} {inner})"


@dataclass(frozen=True)
class FoSentence:
    root: Node
    text: str

    @property
    def rank(self) -> int:
        return quantifier_rank(self.root)

    @property
    def variables(self) -> tuple[str, ...]:
        return binding_order(self.root)


def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise InvalidInput("unexpected end of sentence")
    tok = tokens[pos]
    if tok == ")":
        raise InvalidInput("unexpected ')'")
    if tok != "(":
        return tok, pos + 1
    items = []
    pos += 1
    while True:
        if pos >= len(tokens):
            raise InvalidInput("missing ')'")
        if tokens[pos] == ")":
            return items, pos + 1
        item, pos = _read(tokens, pos)
        items.append(item)


def _build(expr) -> Node:
    if not isinstance(expr, list) or not expr:
        raise InvalidInput(f"expected a parenthesised formula, got {expr!r}")
    op, *rest = expr
    if not isinstance(op, str):
        raise InvalidInput("operator must be a symbol")
    if op in QUANTS:
        if len(rest) != 2 or not isinstance(rest[0], str):
            raise InvalidInput(f"({op} var formula) expected")
        return Node(op, (rest[0], _build(rest[1])))
    if op in ATOMS:
        if len(rest) != 2 or not all(isinstance(v, str) for v in rest):
            raise InvalidInput(f"({op} x y) expected")
        return Node(op, tuple(rest))
    if op == "not":
        if len(rest) != 1:
            raise InvalidInput("(not formula) expected")
        return Node("not", (_build(rest[0]),))
    if op in ("implies", "->"):
        if len(rest) != 2:
            raise InvalidInput("(implies a b) expected")
        return Node("implies", (_build(rest[0]), _build(rest[1])))
    if op in ("and", "or"):
        if not rest:
            raise InvalidInput(f"({op} ...) needs arguments")
        return Node(op, tuple(_build(r) for r in rest))
    raise InvalidInput(f"unknown operator {op!r}")


def free_vars(node: Node) -> frozenset[str]:
    if node.op in ATOMS:
        return frozenset(node.args)
    if node.op in QUANTS:
        return free_vars(node.args[1]) - {node.args[0]}
    return frozenset().union(*(free_vars(a) for a in node.args))


def quantifier_rank(node: Node) -> int:
    if node.op in ATOMS:
        return 0
    if node.op in QUANTS:
        return 1 + quantifier_rank(node.args[1])
    return max(quantifier_rank(a) for a in node.args)


def binding_order(node: Node) -> tuple[str, ...]:
    out: list[str] = []

    def walk(nd):
        if nd.op in QUANTS:
            if nd.args[0] not in out:
                out.append(nd.args[0])
            walk(nd.args[1])
        elif nd.op not in ATOMS:
            for a in nd.args:
                walk(a)

    walk(node)
    return tuple(out)


def parse_sentence(text: str) -> FoSentence:
    tokens = _tokenize(text)
    expr, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise InvalidInput("trailing tokens after sentence")
    root = _build(expr)
    fv = free_vars(root)
    if fv:
        raise InvalidInput(f"sentence has free variables: {', '.join(sorted(fv))}")
    return FoSentence(root, text.strip())


# ---------------------------------------------------------------------------
# evaluation


class _Evaluator:
    def __init__(self, M: Structure, order: Sequence[str], budget: int):
        self.n = n = M.size
        self.order = {v: k for k, v in enumerate(order)}
        self.budget = budget
        R = np.zeros((n, n), dtype=bool)
        if M.edge_count:
            e = M.edges - 1
            R[e[:, 0], e[:, 1]] = True
            R[e[:, 1], e[:, 0]] = True
        S = np.zeros((n, n), dtype=bool)
        for x, y in M.succ or ():
            S[x - 1, y - 1] = True
        self.R = R
        self.S = S
        self.E = np.eye(n, dtype=bool)

    def _sorted(self, vs) -> tuple[str, ...]:
        return tuple(sorted(vs, key=self.order.__getitem__))

    def _expand(self, arr: np.ndarray, have: tuple[str, ...], want: tuple[str, ...]) -> np.ndarray:
        """Insert singleton axes so ``arr`` (axes ``have``) broadcasts over ``want``."""
        shape = [1] * len(want)
        pos = {v: k for k, v in enumerate(want)}
        for v, size in zip(have, arr.shape):
            shape[pos[v]] = size
        return arr.reshape(shape)

    def eval(self, node: Node, env: dict[str, int]) -> tuple[np.ndarray, tuple[str, ...]]:
        op = node.op
        if op in ATOMS:
            u, v = node.args
            mat = {"R": self.R, "S": self.S, "=": self.E}[op]
            if u in env and v in env:
                return np.asarray(mat[env[u], env[v]]), ()
            if u in env:
                return mat[env[u], :], (v,)
            if v in env:
                return mat[:, env[v]], (u,)
            if u == v:
                return np.diagonal(mat).copy(), (u,)
            if self.order[u] < self.order[v]:
                return mat, (u, v)
            return mat.T, (v, u)
        if op in QUANTS:
            x, body = node.args
            inner_free = self._sorted((free_vars(body) - {x}) - set(env))
            if inner_free and self.n ** (len(inner_free) + 1) > self.budget:
                # fix the outermost free variable to each constant
                first, rest = inner_free[0], inner_free[1:]
                parts = []
                for c in range(self.n):
                    env2 = dict(env)
                    env2[first] = c
                    arr, have = self.eval(node, env2)
                    parts.append(self._expand(arr, have, rest) * np.ones([self.n] * len(rest), dtype=bool)
                                 if rest else arr)
                return np.stack(parts), inner_free
            env2 = {k: v for k, v in env.items() if k != x}
            arr, have = self.eval(body, env2)
            if x in have:
                axis = have.index(x)
                arr = arr.any(axis=axis) if op == "exists" else arr.all(axis=axis)
                have = have[:axis] + have[axis + 1:]
            return arr, have
        if op == "not":
            arr, have = self.eval(node.args[0], env)
            return ~arr, have
        if op == "implies":
            a, ha = self.eval(node.args[0], env)
            b, hb = self.eval(node.args[1], env)
            want = self._sorted(set(ha) | set(hb))
            return (~self._expand(a, ha, want)) | self._expand(b, hb, want), want
        # and / or with short-circuit on constant results
        parts = []
        for sub in node.args:
            arr, have = self.eval(sub, env)
            if not have:
                val = bool(arr)
                if op == "and" and not val:
                    return np.asarray(False), ()
                if op == "or" and val:
                    return np.asarray(True), ()
            parts.append((arr, have))
        want = self._sorted(set().union(*(set(h) for _, h in parts)))
        acc = None
        for arr, have in parts:
            x = self._expand(arr, have, want)
            acc = x if acc is None else (acc & x if op == "and" else acc | x)
        return acc, want


def check_budget(sentence: FoSentence, n: int, rank_cap: int = RANK_CAP) -> None:
    r = sentence.rank
    if r > rank_cap:
        raise CapExceeded(f"quantifier rank {r} exceeds cap {rank_cap}")
    limit = N_BUDGET.get(r, N_BUDGET[3])
    if n > limit:
        raise CapExceeded(f"n={n} exceeds the rank-{r} budget of {limit}")


def fo_evaluate(sentence: FoSentence | str, M: Structure, *, rank_cap: int = RANK_CAP,
                budget: int = CELL_BUDGET) -> bool:
    if isinstance(sentence, str):
        sentence = parse_sentence(sentence)
    check_budget(sentence, M.size, rank_cap)
    ev = _Evaluator(M, sentence.variables, budget)
    arr, have = ev.eval(sentence.root, {})
    assert not have
    return bool(arr)


def naive_evaluate(sentence: FoSentence | str, M: Structure) -> bool:
    """Plain recursive model checking (reference implementation for tests)."""
    if isinstance(sentence, str):
        sentence = parse_sentence(sentence)

    def ev(node: Node, env: dict[str, int]) -> bool:
        op = node.op
        if op == "R":
            return M.has_edge(env[node.args[0]], env[node.args[1]]) if env[node.args[0]] != env[node.args[1]] else False
        if op == "S":
            return M.has_succ(env[node.args[0]], env[node.args[1]])
        if op == "=":
            return env[node.args[0]] == env[node.args[1]]
        if op == "not":
            return not ev(node.args[0], env)
        if op == "implies":
            return (not ev(node.args[0], env)) or ev(node.args[1], env)
        if op == "and":
            return all(ev(a, env) for a in node.args)
        if op == "or":
            return any(ev(a, env) for a in node.args)
        x, body = node.args
        vals = (ev(body, {**env, x: c}) for c in M.vertices)
        return any(vals) if op == "exists" else all(vals)

    return ev(sentence.root, {})


@dataclass(frozen=True)
class ProbabilityRow:
    model: str
    n: int
    trials: int
    successes: int
    p: float
    ci_low: float
    ci_high: float

    def to_json(self) -> dict:
        return dict(self.__dict__)


def wilson_interval(k: int, n: int, level: float = 0.95) -> tuple[float, float]:
    from scipy.stats import binomtest

    ci = binomtest(k, n).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def estimate_probability(sentence: FoSentence | str, model: str, n_grid: Sequence[int], trials: int,
                         seed: int = 0, alpha=None, **sample_kw) -> list[ProbabilityRow]:
    """Empirical ``P(M_n |= sentence)`` per ``n`` with Wilson 95% intervals."""
    from ..sampler import SampleConfig, derive_seed, sample
    from ..weights import DEFAULT_ALPHA

    if isinstance(sentence, str):
        sentence = parse_sentence(sentence)
    alpha = alpha or DEFAULT_ALPHA
    rows = []
    if trials <= 0:
        return rows
    for n in n_grid:
        check_budget(sentence, n)
        hits = 0
        for t in range(trials):
            M = sample(SampleConfig(model, n, alpha, derive_seed(seed, n, t), **sample_kw))
            hits += fo_evaluate(sentence, M)
        lo, hi = wilson_interval(hits, trials)
        rows.append(ProbabilityRow(model, n, trials, hits, hits / trials, lo, hi))
    return rows
