"""Iteration ratios to zero-init across data seeds and working-set rules.

Shows how much the seeding benefit depends on the particular sample.
"""

import argparse

import numpy as np

from alphaseed.cross_validation import run_cv
from alphaseed.data_io import make_folds
from alphaseed.kernel import KernelSpec
from alphaseed.seeding import STRATEGIES
from alphaseed.solver import SolverConfig
from alphaseed.synthetic import make_blobs


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--seeds", type=int, default=6)
    p.add_argument("--separation", type=float, default=4.0)
    p.add_argument("--C", type=float, default=10.0)
    p.add_argument("--gamma", type=float, default=0.5)
    args = p.parse_args()

    spec = KernelSpec("gaussian", args.gamma)
    for selection in ("first-order", "second-order"):
        cfg = SolverConfig(selection=selection)
        table = []
        for s in range(args.seeds):
            ds = make_blobs(args.n, seed=s, separation=args.separation)
            plan = make_folds(ds, 10, seed=0)
            its = {st: run_cv(ds, plan, spec, args.C, st, cfg).total_iterations for st in STRATEGIES}
            table.append([its[st] / its["zero"] for st in STRATEGIES])
            print(f"{selection:<13} seed={s}  zero={its['zero']:6d}  "
                  + "  ".join(f"{st}={r:.2f}" for st, r in zip(STRATEGIES, table[-1])))
        arr = np.array(table)
        print(f"{selection:<13} mean          " + "  ".join(f"{st}={r:.2f}" for st, r in zip(STRATEGIES, arr.mean(0))))
        print(f"{selection:<13} max           " + "  ".join(f"{st}={r:.2f}" for st, r in zip(STRATEGIES, arr.max(0))))


if __name__ == "__main__":
    main()
