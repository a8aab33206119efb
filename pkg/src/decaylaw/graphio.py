"""Line-oriented graph and pair files.

::

    # comment
    model m0          # m0 | m1 | m05 | custom
    n 5
    alpha 7/10        # optional
    edge 1 2          # i < j
    succ 2 3
    base 1            # pair files only

``pf``/``pl`` lines (reserved unary predicates) are accepted and ignored.
``kind plain|successor`` forces the structure kind for custom files.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidInput
from .structures import Pair, Structure

MODELS = ("m0", "m1", "m05", "custom")


@dataclass(frozen=True)
class GraphFile:
    structure: Structure
    model: str = "custom"
    alpha: str | None = None
    base: frozenset[int] | None = None
    ignored: tuple[str, ...] = ()

    def pair(self) -> Pair:
        return Pair(self.structure, self.base or frozenset())


def parse_graph_text(text: str) -> GraphFile:
    model = "custom"
    n = None
    alpha = None
    kind = None
    edges: list[tuple[int, int]] = []
    succ: list[tuple[int, int]] = []
    base: list[int] = []
    ignored: list[str] = []
    saw_base = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key, args = parts[0], parts[1:]
        try:
            if key == "model":
                (model,) = args
                if model not in MODELS:
                    raise InvalidInput(f"line {lineno}: unknown model {model!r}")
            elif key == "n":
                (v,) = args
                n = int(v)
            elif key == "alpha":
                (alpha,) = args
            elif key == "kind":
                (kind,) = args
                if kind not in ("plain", "successor"):
                    raise InvalidInput(f"line {lineno}: unknown kind {kind!r}")
            elif key == "edge":
                i, j = map(int, args)
                if not i < j:
                    raise InvalidInput(f"line {lineno}: edge must satisfy i < j")
                edges.append((i, j))
            elif key == "succ":
                i, j = map(int, args)
                succ.append((i, j))
            elif key == "base":
                saw_base = True
                base.extend(int(a) for a in args)
            elif key in ("pf", "pl"):
                ignored.append(line)
            else:
                raise InvalidInput(f"line {lineno}: unknown directive {key!r}")
        except ValueError as exc:
            if isinstance(exc, InvalidInput):
                raise
            raise InvalidInput(f"line {lineno}: malformed {key!r} line") from exc
    if n is None:
        raise InvalidInput("missing 'n' line")
    if kind is None:
        kind = "successor" if (model in ("m1", "m05") or succ) else "plain"
    if kind == "plain" and succ:
        raise InvalidInput("succ lines in a plain structure")
    structure = Structure(n, edges, succ if kind == "successor" else None)
    return GraphFile(structure, model, alpha, frozenset(base) if saw_base else None, tuple(ignored))


def read_graph(path) -> GraphFile:
    return parse_graph_text(Path(path).read_text(encoding="utf-8"))


def format_graph(structure: Structure, *, model: str = "custom", alpha: str | None = None,
                 base=None) -> str:
    lines = [f"model {model}", f"n {structure.size}"]
    if alpha is not None:
        lines.append(f"alpha {alpha}")
    if structure.succ is not None and model == "custom":
        lines.append("kind successor")
    lines.extend(f"edge {i} {j}" for i, j in structure.edges.tolist())
    lines.extend(f"succ {x} {y}" for x, y in structure.succ or ())
    if base is not None:
        lines.extend(f"base {a}" for a in sorted(base))
    return "\n".join(lines) + "\n"


def write_graph(path, structure: Structure, **kw) -> None:
    Path(path).write_text(format_graph(structure, **kw), encoding="utf-8")


def format_pair(pair: Pair, **kw) -> str:
    return format_graph(pair.ambient, base=pair.base, **kw)


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
