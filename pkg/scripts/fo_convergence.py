"""Empirical probabilities of a few first-order sentences along a doubling grid.

    python3 scripts/fo_convergence.py --model m05 --n-grid 50,100,200,400 --trials 200
"""

from __future__ import annotations

import argparse
import json

from decaylaw.experiments.fo import estimate_probability

SENTENCES = {
    "first_s_pair_is_edge": "(exists x (exists y (and (S x y) (not (exists z (S z x))) (R x y))))",
    "some_s_pair_is_edge": "(exists x (exists y (and (S x y) (R x y))))",
    "every_vertex_has_successor": "(forall x (exists y (S x y)))",
    "isolated_vertex": "(exists x (forall y (not (R x y))))",
    "some_s_pair_not_edge": "(exists x (exists y (and (S x y) (not (R x y)))))",
    "all_s_pairs_edges": "(forall x (forall y (implies (S x y) (R x y))))",
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--model", default="m1", choices=("m0", "m1", "m05"))
    ap.add_argument("--n-grid", default="50,100,200,400")
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--only", help="comma-separated sentence names")
    args = ap.parse_args()

    grid = [int(x) for x in args.n_grid.split(",")]
    names = args.only.split(",") if args.only else list(SENTENCES)
    out = {"schema": 1, "model": args.model, "trials": args.trials, "sentences": {}}
    for name in names:
        rows = estimate_probability(SENTENCES[name], args.model, grid, args.trials, seed=args.seed)
        out["sentences"][name] = [r.to_json() for r in rows]
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
