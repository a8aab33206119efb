"""Search for an extension that is free over the closure of its base image.

For a base map ``f`` with image ``R`` a witness ``g`` must satisfy

(i)   its new images avoid ``cl^t(R)``;
(ii)  no edge or S-pair joins its new images to ``cl^t(R) - R``;
(iii) ``cl^k(Rang g)`` stays inside ``Rang g | cl^k(R)``.

Closures here default to a single stage (``steps=1``); ``steps=None`` uses the
fixpoint.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..closures import cl_km_trace
from ..errors import PreconditionError
from ..relations import oracle_for
from ..structures import Pair, Structure, free_over
from ..weights import DEFAULT_ALPHA, Alpha
from .extensions import NODE_CAP, ExtensionSearch


@dataclass
class WitnessResult:
    found: bool
    g: dict[int, int] | None
    examined: int
    rejected: dict[str, int] = field(default_factory=lambda: {"i": 0, "ii": 0, "iii": 0})
    closure_t_size: int = 0
    closure_k_size: int = 0
    censored: bool = False


def _closure(X, M: Structure, k: int, steps: int | None, alpha: Alpha) -> frozenset[int]:
    return cl_km_trace(X, M, k, steps, alpha).result


def check_witness_preconditions(pattern: Pair, k: int, t: int, alpha: Alpha) -> None:
    O = oracle_for(pattern.ambient, alpha)
    A = O.K.mask(pattern.base)
    if not O.is_s(A, O.K.full):
        raise PreconditionError("free-extension witnesses need a <=*_s pattern")
    if k + pattern.ambient.size > t:
        raise PreconditionError(f"need k + |B| <= t (k={k}, |B|={pattern.ambient.size}, t={t})")


def witness_clauses(M: Structure, f: Mapping[int, int], g: Mapping[int, int], k: int, t: int,
                    alpha: Alpha = DEFAULT_ALPHA, steps: int | None = 1) -> dict[str, bool]:
    """Evaluate clauses (i)-(iii) from scratch for a given extension ``g``."""
    R = frozenset(f.values())
    G = frozenset(g.values())
    cl_t = _closure(R, M, t, steps, alpha)
    cl_kf = _closure(R, M, k, steps, alpha)
    return {
        "i": G & cl_t == R,
        "ii": free_over(M, G, cl_t, R),
        "iii": _closure(G, M, k, steps, alpha) <= G | cl_kf,
    }


def free_extension_witness(M: Structure, f: Mapping[int, int], pattern: Pair, k: int, t: int,
                           alpha: Alpha = DEFAULT_ALPHA, *, steps: int | None = 1, mode: str = "induced",
                           node_cap: int = NODE_CAP, check: bool = True) -> WitnessResult:
    if check:
        check_witness_preconditions(pattern, k, t, alpha)
    R = frozenset(f.values())
    cl_t = _closure(R, M, t, steps, alpha)
    cl_kf = _closure(R, M, k, steps, alpha)
    search = ExtensionSearch(M, pattern, f, mode, node_cap=node_cap)
    res = WitnessResult(False, None, 0, closure_t_size=len(cl_t), closure_k_size=len(cl_kf))
    for images in search.iter_images():
        res.examined += 1
        new = frozenset(images)
        if new & cl_t:
            res.rejected["i"] += 1
            continue
        G = R | new
        if not free_over(M, G, cl_t, R):
            res.rejected["ii"] += 1
            continue
        if not _closure(G, M, k, steps, alpha) <= G | cl_kf:
            res.rejected["iii"] += 1
            continue
        res.found = True
        res.g = search.as_map(images)
        break
    res.censored = search.censored
    return res
