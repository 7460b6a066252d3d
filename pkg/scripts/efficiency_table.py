"""Init / rest / iterations / accuracy per strategy for one k-fold setting.

    python scripts/efficiency_table.py                      # 300-instance blobs
    python scripts/efficiency_table.py --data heart.txt --C 2182 --gamma 0.2
"""

import argparse

from alphaseed.cli import emit_report
from alphaseed.cross_validation import run_cv
from alphaseed.data_io import load_dataset, make_folds
from alphaseed.kernel import KernelSpec
from alphaseed.seeding import STRATEGIES
from alphaseed.solver import SolverConfig
from alphaseed.synthetic import make_blobs


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--data")
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--data-seed", type=int, default=0)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--C", type=float, default=10.0)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--selection", default="second-order")
    p.add_argument("--repeats", type=int, default=3, help="keep the fastest timing of this many runs")
    args = p.parse_args()

    ds = load_dataset(args.data) if args.data else make_blobs(args.n, seed=args.data_seed)
    plan = make_folds(ds, args.k, seed=0)
    spec = KernelSpec("gaussian", args.gamma)
    cfg = SolverConfig(selection=args.selection)
    reports = []
    for s in STRATEGIES:
        runs = [run_cv(ds, plan, spec, args.C, s, cfg) for _ in range(args.repeats)]
        reports.append(min(runs, key=lambda r: r.total_seconds))
    print(emit_report(reports, "table"), end="")


if __name__ == "__main__":
    main()
