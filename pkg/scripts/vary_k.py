"""SIR speedup over zero-init as the number of folds grows."""

import argparse

from alphaseed.cross_validation import run_cv
from alphaseed.data_io import make_folds
from alphaseed.kernel import KernelSpec
from alphaseed.synthetic import make_blobs


def best_time(ds, plan, spec, C, strategy, repeats):
    runs = [run_cv(ds, plan, spec, C, strategy) for _ in range(repeats)]
    fastest = min(runs, key=lambda r: r.total_seconds)
    return fastest.total_seconds, fastest.total_iterations


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--C", type=float, default=10.0)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--ks", default="3,5,10,20,50,100")
    p.add_argument("--repeats", type=int, default=3)
    args = p.parse_args()

    ds = make_blobs(args.n, seed=0)
    spec = KernelSpec("gaussian", args.gamma)
    print(f"{'k':>4}  {'zero s':>8}  {'sir s':>8}  {'zero it':>8}  {'sir it':>8}  speedup")
    for k in (int(v) for v in args.ks.split(",")):
        plan = make_folds(ds, k, seed=0)
        zt, zi = best_time(ds, plan, spec, args.C, "zero", args.repeats)
        st, si = best_time(ds, plan, spec, args.C, "sir", args.repeats)
        print(f"{k:>4}  {zt:8.4f}  {st:8.4f}  {zi:8d}  {si:8d}  {zt / st:6.2f}x")


if __name__ == "__main__":
    main()
