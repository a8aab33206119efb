"""Named extension patterns used by the experiments and the CLI."""

from __future__ import annotations

from pathlib import Path

from .errors import InvalidInput
from .graphio import read_graph
from .structures import Pair, Structure


def _pair(size, edges, base, succ=None) -> Pair:
    return Pair(Structure(size, edges, succ), frozenset(base))


# base vertices come first in every builtin
BUILTIN: dict[str, Pair] = {
    "pendant": _pair(2, [(1, 2)], {1}),
    "path2": _pair(3, [(1, 2), (2, 3)], {1}),
    "common_neighbor": _pair(3, [(1, 3), (2, 3)], {1, 2}),
    "triangle": _pair(3, [(1, 2), (1, 3), (2, 3)], ()),
    "isolated": _pair(2, [], {1}),
    "triangle_through": _pair(3, [(1, 2), (1, 3), (2, 3)], {1}),
}


def load_pattern(spec: str) -> tuple[str, Pair]:
    """A builtin name or a pair file path; returns ``(name, pair)``."""
    if spec in BUILTIN:
        return spec, BUILTIN[spec]
    path = Path(spec)
    if not path.exists():
        raise InvalidInput(f"unknown pattern {spec!r} (builtins: {', '.join(sorted(BUILTIN))})")
    gf = read_graph(path)
    if gf.base is None:
        raise InvalidInput(f"{spec}: pattern files need base lines")
    if gf.structure.has_s_cycle:
        raise InvalidInput(f"{spec}: patterns may not contain an S-cycle")
    return path.stem, gf.pair()
