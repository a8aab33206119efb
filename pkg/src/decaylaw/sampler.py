"""Seeded samplers for the distance-decaying models ``m0``, ``m1`` and ``m05``.

For every difference ``d = j - i`` the ``n - d`` pairs form one Bernoulli run
with probability ``p`` of its distance class; hits are visited by geometric
gaps, so the cost is proportional to ``n`` plus the number of edges.

Random numbers come from a splitmix64 counter stream keyed by ``(seed, d)``:
the ``t``-th draw of stream ``d`` is ``mix(key(seed, d) + t * GOLDEN)``.  The
algorithm is fixed and uses only 64-bit integer arithmetic, so outputs are
independent of thread count and platform.  ``u`` in ``(0, 1]`` is
``(z >> 11 + 1) * 2**-53`` and a gap is ``1 + floor(log(u) / log1p(-p))``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import InvalidInput
from .structures import Structure
from .weights import DEFAULT_ALPHA, Alpha

MODELS = ("m0", "m1", "m05")
P1_MODES = ("clamped", "pure")

if "NUMBA_THREADING_LAYER" not in os.environ:
    # skip the TBB probe, which warns on older system TBB builds
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

@dataclass(frozen=True)
class SampleConfig:
    model: str = "m0"
    n: int = 1000
    alpha: Alpha = field(default=DEFAULT_ALPHA)
    seed: int = 0
    p1_mode: str = "clamped"

    def __post_init__(self):
        if self.model not in MODELS:
            raise InvalidInput(f"unknown model {self.model!r}")
        if self.n < 2:
            raise InvalidInput("n must be at least 2")
        if self.p1_mode not in P1_MODES:
            raise InvalidInput(f"unknown p1 mode {self.p1_mode!r}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput("seed must fit in 64 unsigned bits")

    @property
    def successor(self) -> bool:
        return self.model != "m0"


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit seed for one trial, independent across distinct key tuples."""
    ss = np.random.SeedSequence([int(seed), *map(int, keys)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def distance_class(i: int, j: int, config: SampleConfig) -> int:
    """The index ``l`` of ``p_l`` used for the pair ``{i, j}``."""
    n = config.n
    if not (1 <= i <= n and 1 <= j <= n) or i == j:
        raise InvalidInput(f"pair ({i},{j}) out of range 1..{n}")
    d = abs(i - j)
    if config.model == "m05":
        d = min(d, n - d)
    return d


def class_probability(ell: int, alpha: Alpha, p1_mode: str = "clamped") -> float:
    if ell < 1:
        raise InvalidInput("distance class must be positive")
    a = float(alpha)
    if ell == 1 and p1_mode == "clamped":
        ell = 2
    return ell ** -a


def edge_probability(i: int, j: int, config: SampleConfig) -> float:
    return class_probability(distance_class(i, j, config), config.alpha, config.p1_mode)


def probability_label(i: int, j: int, config: SampleConfig) -> str:
    ell = distance_class(i, j, config)
    if ell == 1 and config.p1_mode == "clamped":
        ell = 2
    return f"{ell}^(-{config.alpha})"


def class_probabilities(config: SampleConfig) -> np.ndarray:
    """``probs[d]`` for every difference ``d = j - i`` in ``1..n-1`` (index 0 unused)."""
    n = config.n
    d = np.arange(n, dtype=np.float64)
    cls = d.copy()
    if config.model == "m05":
        cls = np.minimum(d, n - d)
    if config.p1_mode == "clamped":
        cls = np.where(cls == 1, 2.0, cls)
    probs = np.zeros(n, dtype=np.float64)
    probs[1:] = cls[1:] ** -float(config.alpha)
    return probs


def expected_edge_count(config: SampleConfig) -> float:
    n = config.n
    probs = class_probabilities(config)
    runs = n - np.arange(n, dtype=np.float64)
    return math.fsum((runs[1:] * probs[1:]).tolist())


# ---------------------------------------------------------------------------
# numba kernels


@numba.njit(inline="always")
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@numba.njit(inline="always")
def _stream_key(seed, d):
    return _mix(_mix(seed) ^ (np.uint64(d) * np.uint64(0xD1B54A32D192ED03)))


@numba.njit(inline="always")
def _uniform(key, t):
    z = _mix(key + (t + np.uint64(1)) * np.uint64(0x9E3779B97F4A7C15))
    return (np.float64(z >> np.uint64(11)) + 1.0) * (1.0 / 9007199254740992.0)


@numba.njit(inline="always")
def _gap(u, log1mp):
    return 1 + np.int64(math.floor(math.log(u) / log1mp))


@numba.njit(parallel=True, cache=True)
def _count_hits(n, probs, seed):
    counts = np.zeros(n, dtype=np.int64)
    for d in numba.prange(1, n):
        p = probs[d]
        run = n - d
        if p <= 0.0:
            continue
        key = _stream_key(seed, d)
        c = 0
        if p >= 1.0:
            c = run
        else:
            lg = math.log1p(-p)
            t = np.uint64(0)
            pos = _gap(_uniform(key, t), lg)
            while pos <= run:
                c += 1
                t += np.uint64(1)
                pos += _gap(_uniform(key, t), lg)
        counts[d] = c
    return counts


@numba.njit(parallel=True, cache=True)
def _fill_hits(n, probs, seed, offsets, out):
    for d in numba.prange(1, n):
        p = probs[d]
        run = n - d
        if p <= 0.0:
            continue
        o = offsets[d]
        if p >= 1.0:
            for i in range(run):
                out[o + i, 0] = i + 1
                out[o + i, 1] = i + 1 + d
            continue
        key = _stream_key(seed, d)
        lg = math.log1p(-p)
        t = np.uint64(0)
        pos = _gap(_uniform(key, t), lg)
        while pos <= run:
            out[o, 0] = pos
            out[o, 1] = pos + d
            o += 1
            t += np.uint64(1)
            pos += _gap(_uniform(key, t), lg)


@numba.njit(cache=True)
def _bucket_by_first(out, n):
    """Stable counting sort on the first column: rows arrive in ``(d, i)``
    order, so within one ``i`` the second column is already increasing."""
    start = np.zeros(n + 2, dtype=np.int64)
    for e in range(out.shape[0]):
        start[out[e, 0] + 1] += 1
    for i in range(1, n + 2):
        start[i] += start[i - 1]
    edges = np.empty_like(out)
    for e in range(out.shape[0]):
        i = out[e, 0]
        pos = start[i]
        edges[pos, 0] = i
        edges[pos, 1] = out[e, 1]
        start[i] = pos + 1
    return edges


def sample_edges(config: SampleConfig) -> np.ndarray:
    """Canonical sorted ``(E, 2)`` edge array of one sample."""
    n = config.n
    probs = class_probabilities(config)
    seed = np.uint64(config.seed)
    counts = _count_hits(n, probs, seed)
    offsets = np.zeros(n, dtype=np.int64)
    np.cumsum(counts[:-1], out=offsets[1:])
    out = np.empty((int(counts.sum()), 2), dtype=np.int64)
    _fill_hits(n, probs, seed, offsets, out)
    return _bucket_by_first(out, n)


def successor_pairs(config: SampleConfig) -> tuple[tuple[int, int], ...] | None:
    n = config.n
    if config.model == "m0":
        return None
    chain = tuple((i, i + 1) for i in range(1, n))
    if config.model == "m05":
        chain = chain + ((n, 1),)
    return chain


def sample(config: SampleConfig) -> Structure:
    edges = sample_edges(config)
    return Structure(config.n, edges, successor_pairs(config), validate=False, _canonical=True)


def sample_model(model: str, n: int, seed: int, alpha: Alpha = DEFAULT_ALPHA, **kw) -> Structure:
    return sample(SampleConfig(model, n, alpha, seed, **kw))


def per_distance_counts(structure: Structure, model: str = "m0") -> np.ndarray:
    """``counts[l]`` = number of edges in distance class ``l``."""
    n = structure.size
    d = structure.edges[:, 1] - structure.edges[:, 0]
    if model == "m05":
        d = np.minimum(d, n - d)
    return np.bincount(d, minlength=n)


def class_sizes(config: SampleConfig) -> np.ndarray:
    """Number of vertex pairs in each distance class."""
    n = config.n
    d = np.arange(n)
    runs = np.where(d > 0, n - d, 0)
    if config.model != "m05":
        return runs
    out = np.zeros(n, dtype=np.int64)
    cls = np.minimum(d, n - d)
    np.add.at(out, cls[1:], runs[1:])
    return out


def sample_stats(config: SampleConfig, structure: Structure, distances=(1, 2, 3, 10, 100)) -> dict:
    counts = per_distance_counts(structure, config.model)
    sizes = class_sizes(config)
    per = []
    for ell in distances:
        if ell >= config.n:
            continue
        per.append({
            "distance": int(ell),
            "pairs": int(sizes[ell]),
            "edges": int(counts[ell]),
            "p": class_probability(int(ell), config.alpha, config.p1_mode),
        })
    return {
        "schema": 1,
        "n": config.n,
        "alpha": str(config.alpha),
        "model": config.model,
        "seed": config.seed,
        "edge_count": structure.edge_count,
        "expected_edge_count": expected_edge_count(config),
        "per_distance": per,
    }
