"""Leave-one-out comparison, where the AVG and TOP baselines apply directly."""

import argparse

from alphaseed.cli import emit_report
from alphaseed.cross_validation import run_loocv
from alphaseed.kernel import KernelSpec
from alphaseed.seeding import STRATEGIES
from alphaseed.synthetic import make_blobs


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--C", type=float, default=10.0)
    p.add_argument("--gamma", type=float, default=0.5)
    args = p.parse_args()
    ds = make_blobs(args.n, seed=0)
    spec = KernelSpec("gaussian", args.gamma)
    reports = [run_loocv(ds, spec, args.C, s) for s in STRATEGIES]
    print(emit_report(reports, "table"), end="")


if __name__ == "__main__":
    main()
