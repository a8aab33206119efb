"""Stage sizes of the closure of a base image on m0 hosts.

One closure stage from a single base vertex stays tiny, while iterating
to the fixpoint keeps absorbing triangles-through-a-vertex and grows far
beyond the base; this is why the witness search defaults to one stage.

    python3 scripts/closure_percolation.py --n 1000 --k 3 --samples 5
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from decaylaw.closures import LocalDecider, cl_step_traced
from decaylaw.sampler import SampleConfig, derive_seed, sample
from decaylaw.weights import DEFAULT_ALPHA


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--samples", type=int, default=5)
    ap.add_argument("--max-stages", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=float, default=60.0, help="seconds per trial; checked between stages")
    args = ap.parse_args()

    runs = []
    for t in range(args.samples):
        M = sample(SampleConfig("m0", args.n, seed=derive_seed(args.seed, args.n, t)))
        v = int(np.random.default_rng(derive_seed(args.seed, args.n, t, 1)).integers(1, args.n + 1))
        dec = LocalDecider(M, DEFAULT_ALPHA)
        cur = frozenset({v})
        sizes, secs, tried = [1], [], 0
        t0 = time.perf_counter()
        for _ in range(args.max_stages):
            s0 = time.perf_counter()
            nxt, _, cands = cl_step_traced(cur, M, args.k, DEFAULT_ALPHA, dec)
            secs.append(round(time.perf_counter() - s0, 3))
            tried += cands
            if nxt == cur:
                break
            cur = nxt
            sizes.append(len(cur))
            if time.perf_counter() - t0 > args.budget:
                break
        runs.append({"trial": t, "base": v, "stage_sizes": sizes, "stage_seconds": secs,
                     "candidates": tried, "fixpoint": nxt == cur})
    print(json.dumps({"schema": 1, "n": args.n, "k": args.k, "runs": runs}, indent=2))


if __name__ == "__main__":
    main()
