"""Command-line driver: run cross-validation chains and print a comparison.

Exit codes: 0 success, 2 configuration error, 3 malformed data.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .cross_validation import CvReport, run_cv
from .data_io import Dataset, InvalidFoldCountError, ParseError, UnsupportedTaskError, load_dataset, make_folds
from .kernel import Kernel, KernelSpec, cache_budget_from_env
from .seeding import STRATEGIES, SeedConfig
from .solver import SolverConfig
from .synthetic import make_blobs

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3

CSV_HEADER = ["strategy", "fold", "init_s", "train_s", "iterations", "correct", "total"]


class ConfigError(ValueError):
    pass


@dataclass
class CliConfig:
    data_path: str | None = None
    blobs: int | None = None
    k: int = 10
    loocv: bool = False
    C: float = 1.0
    gamma: float = 1.0
    kernel: str = "gaussian"
    epsilon: float = 1e-3
    max_iterations: int = 10_000_000
    strategies: list[str] = field(default_factory=lambda: ["zero", "sir"])
    fold_seed: int | None = 0
    rng_seed: int = 0
    format: str = "table"
    cache_bytes: int | None = None
    selection: str = "second-order"
    no_timing: bool = False
    parallel: bool = False

    def validate(self) -> None:
        if (self.data_path is None) == (self.blobs is None):
            raise ConfigError("exactly one of --data or --blobs is required")
        if not self.loocv and self.k < 3:
            raise ConfigError("k must be ≥ 3")
        if not self.C > 0:
            raise ConfigError("C must be > 0")
        if self.kernel == "gaussian" and not self.gamma > 0:
            raise ConfigError("gamma must be > 0 for the gaussian kernel")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be > 0")
        if self.max_iterations < 0:
            raise ConfigError("max-iterations must be non-negative")
        unknown = [s for s in self.strategies if s not in STRATEGIES]
        if unknown:
            raise ConfigError(f"unknown strategy {unknown[0]!r}; choose from {', '.join(STRATEGIES)} or 'all'")
        if not self.strategies:
            raise ConfigError("no strategies given")


def parse_strategies(text: str) -> list[str]:
    names = [s.strip().lower() for s in text.split(",") if s.strip()]
    out: list[str] = []
    for name in names:
        for s in (STRATEGIES if name == "all" else (name,)):
            if s not in out:
                out.append(s)
    return out


def _fold_seed(text: str) -> int | None:
    return None if text.lower() == "none" else int(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="alphaseed", description=__doc__.splitlines()[0])
    src = p.add_argument_group("data")
    src.add_argument("--data", dest="data_path", help="dataset in sparse 'label dim:value ...' format")
    src.add_argument("--blobs", type=int, help="use the n-instance synthetic 2-D blobs dataset (data seed 0) instead")
    p.add_argument("--k", type=int, default=10, help="number of folds (≥ 3)")
    p.add_argument("--loocv", action="store_true", help="leave-one-out (k = n)")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--kernel", choices=("gaussian", "linear"), default="gaussian")
    p.add_argument("--epsilon", type=float, default=1e-3)
    p.add_argument("--max-iterations", type=int, default=10_000_000)
    p.add_argument("--strategies", type=parse_strategies, default=["zero", "sir"],
                   help="comma-separated subset of " + ",".join(STRATEGIES) + " or 'all'")
    p.add_argument("--fold-seed", type=_fold_seed, default=0, help="fold shuffling seed, or 'none'")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--cache-bytes", type=int, default=None)
    p.add_argument("--selection", choices=("first-order", "second-order"), default="second-order")
    p.add_argument("--no-timing", action="store_true", help="zero all wall-clock fields")
    p.add_argument("--parallel", action="store_true", help="run strategy chains concurrently")
    return p


def parse_config(argv) -> CliConfig:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            raise
        raise ConfigError("invalid arguments") from exc
    cfg = CliConfig(**vars(ns))
    cfg.validate()
    return cfg


def _fmt_seconds(x: float) -> str:
    return f"{x:.4f}"


def emit_report(reports: list[CvReport], fmt: str) -> str:
    if not reports:
        raise ValueError("no reports to emit")
    if fmt == "json":
        return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in reports:
            for m in r.per_fold:
                w.writerow([r.strategy, m.fold, repr(m.init_seconds), repr(m.train_seconds),
                            m.iterations, m.test_correct, m.test_total])
            w.writerow([r.strategy, "total", repr(r.total_init_seconds), repr(r.total_rest_seconds),
                        r.total_iterations, sum(m.test_correct for m in r.per_fold), r.n])
        return buf.getvalue()
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")

    base = next((r for r in reports if r.strategy == "zero"), None)
    header = ["strategy", "init (s)", "rest (s)", "iterations", "accuracy (%)"]
    if base is not None:
        header.append("speedup")
    rows = []
    for r in reports:
        row = [r.strategy, _fmt_seconds(r.total_init_seconds), _fmt_seconds(r.total_rest_seconds),
               str(r.total_iterations), f"{r.accuracy_percent:.2f}"]
        if base is not None:
            row.append(f"{base.total_seconds / r.total_seconds:.2f}x" if r.total_seconds > 0 else "-")
        rows.append(row)
    widths = [max(len(h), *(len(row[c]) for row in rows)) for c, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) if c == 0 else h.rjust(w) for c, (h, w) in enumerate(zip(header, widths)))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(v.ljust(w) if c == 0 else v.rjust(w) for c, (v, w) in enumerate(zip(row, widths))))
    first = reports[0]
    lines.append(f"k={first.k} C={first.C:g} gamma={first.gamma:g} kernel={first.kernel} "
                 f"epsilon={first.epsilon:g} fold_seed={first.fold_seed} rng_seed={first.rng_seed}")
    return "\n".join(lines) + "\n"


def _load(cfg: CliConfig) -> Dataset:
    if cfg.blobs is not None:
        return make_blobs(cfg.blobs, seed=0)
    return load_dataset(cfg.data_path)


def run(cfg: CliConfig, ds: Dataset) -> list[CvReport]:
    k = ds.n if cfg.loocv else cfg.k
    plan = make_folds(ds, k, cfg.fold_seed)
    spec = KernelSpec(cfg.kernel, cfg.gamma)
    cache = cfg.cache_bytes if cfg.cache_bytes is not None else cache_budget_from_env()
    solver_cfg = SolverConfig(epsilon=cfg.epsilon, max_iterations=cfg.max_iterations,
                              cache_bytes=cache, selection=cfg.selection)
    seed_cfg = SeedConfig(rng_seed=cfg.rng_seed)

    if cfg.parallel:
        shared = Kernel(spec, ds, cache)
        with ThreadPoolExecutor(max_workers=len(cfg.strategies)) as pool:
            futures = [pool.submit(run_cv, ds, plan, spec, cfg.C, s, solver_cfg, seed_cfg, shared)
                       for s in cfg.strategies]
            reports = [f.result() for f in futures]
    else:
        # A fresh cache per chain keeps the timings comparable.
        reports = [run_cv(ds, plan, spec, cfg.C, s, solver_cfg, seed_cfg) for s in cfg.strategies]
    if cfg.no_timing:
        reports = [r.without_timing() for r in reports]
    return reports


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except ConfigError as exc:
        print(f"alphaseed: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        ds = _load(cfg)
    except OSError as exc:
        print(f"alphaseed: error: cannot read {cfg.data_path}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, UnsupportedTaskError, ValueError) as exc:
        print(f"alphaseed: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        reports = run(cfg, ds)
    except InvalidFoldCountError as exc:
        print(f"alphaseed: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(emit_report(reports, cfg.format))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
