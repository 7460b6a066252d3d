"""k-fold cross-validation chains with alpha seeding between adjacent rounds."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .data_io import Dataset, FoldPlan, make_folds
from .kernel import Kernel, KernelSpec
from .seeding import STRATEGIES, SeedConfig, make_transition, seed
from .solver import SolverConfig, SvmState, decision_values, init_state, kkt_gap, solve


@dataclass
class FoldMetrics:
    fold: int
    init_seconds: float = 0.0
    train_seconds: float = 0.0
    iterations: int = 0
    test_correct: int = 0
    test_total: int = 0
    converged: bool = True
    kkt_gap: float = 0.0
    error: str | None = None


@dataclass
class CvReport:
    strategy: str
    k: int
    C: float
    gamma: float
    kernel: str
    epsilon: float
    fold_seed: int | None
    rng_seed: int
    per_fold: list[FoldMetrics] = field(default_factory=list)
    # Out-of-fold decision value per instance; not serialised.
    decision_values: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def total_iterations(self) -> int:
        return sum(m.iterations for m in self.per_fold)

    @property
    def total_init_seconds(self) -> float:
        return sum(m.init_seconds for m in self.per_fold)

    @property
    def total_rest_seconds(self) -> float:
        return sum(m.train_seconds for m in self.per_fold)

    @property
    def total_seconds(self) -> float:
        return self.total_init_seconds + self.total_rest_seconds

    @property
    def n(self) -> int:
        return sum(m.test_total for m in self.per_fold)

    @property
    def accuracy_percent(self) -> float:
        n = self.n
        return 100.0 * sum(m.test_correct for m in self.per_fold) / n if n else 0.0

    @property
    def converged(self) -> bool:
        return all(m.converged and m.error is None for m in self.per_fold)

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "k": self.k,
            "C": self.C,
            "gamma": self.gamma,
            "kernel": self.kernel,
            "epsilon": self.epsilon,
            "fold_seed": self.fold_seed,
            "rng_seed": self.rng_seed,
            "total_iterations": self.total_iterations,
            "total_init_seconds": self.total_init_seconds,
            "total_rest_seconds": self.total_rest_seconds,
            "accuracy_percent": self.accuracy_percent,
            "converged": self.converged,
            "per_fold": [asdict(m) for m in self.per_fold],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CvReport":
        keys = ("strategy", "k", "C", "gamma", "kernel", "epsilon", "fold_seed", "rng_seed")
        return cls(**{k: d[k] for k in keys}, per_fold=[FoldMetrics(**m) for m in d["per_fold"]])

    def without_timing(self) -> "CvReport":
        per_fold = [FoldMetrics(**{**asdict(m), "init_seconds": 0.0, "train_seconds": 0.0})
                    for m in self.per_fold]
        return CvReport(**{**{k: getattr(self, k) for k in
                              ("strategy", "k", "C", "gamma", "kernel", "epsilon", "fold_seed", "rng_seed")},
                           "per_fold": per_fold, "decision_values": self.decision_values})


def run_cv(ds: Dataset, plan: FoldPlan, spec: KernelSpec, C: float, strategy: str = "zero",
           config: SolverConfig | None = None, seed_config: SeedConfig | None = None,
           kernel: Kernel | None = None, keep_states: bool = False) -> CvReport:
    """Train rounds 1..k in order, seeding round h+1 from round h.

    ``kernel`` may be shared between chains on the same dataset. With
    ``keep_states`` the trained states are attached as ``report.states``.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    config = config or SolverConfig()
    seed_config = seed_config or SeedConfig()
    kernel = kernel or Kernel(spec, ds, config.cache_bytes)
    rng = np.random.default_rng(seed_config.rng_seed)
    report = CvReport(
        strategy=strategy, k=plan.k, C=float(C), gamma=float(spec.gamma), kernel=spec.kind,
        epsilon=config.epsilon, fold_seed=plan.seed, rng_seed=seed_config.rng_seed,
    )
    dvals = np.zeros(ds.n)
    assignment = np.asarray(plan.assignment)
    states: list[SvmState | None] = []
    prev: SvmState | None = None

    for h in range(1, plan.k + 1):
        metrics = FoldMetrics(fold=h)
        t0 = time.perf_counter()
        test_ids = np.flatnonzero(assignment == h - 1)
        train_ids = np.flatnonzero(assignment != h - 1)
        metrics.test_total = int(test_ids.size)
        labels = ds.y[train_ids]
        if not ((labels > 0).any() and (labels < 0).any()):
            metrics.error = "training set contains a single label"
            metrics.converged = False
            metrics.train_seconds = time.perf_counter() - t0
            report.per_fold.append(metrics)
            states.append(None)
            prev = None
            continue

        alpha0 = None
        if h > 1 and prev is not None and strategy != "zero":
            result = seed(strategy, prev, make_transition(plan, h - 1), C, seed_config, rng)
            metrics.init_seconds = result.init_seconds
            alpha0 = result.alpha_prime

        state = solve(init_state(kernel, train_ids, C, alpha0), config)
        dv = decision_values(state, test_ids)
        dvals[test_ids] = dv
        pred = np.where(dv >= 0, 1.0, -1.0)
        metrics.test_correct = int(np.count_nonzero(pred == ds.y[test_ids]))
        metrics.iterations = state.iterations
        metrics.converged = state.converged
        metrics.kkt_gap = kkt_gap(state)
        metrics.train_seconds = time.perf_counter() - t0 - metrics.init_seconds
        report.per_fold.append(metrics)
        states.append(state if keep_states else None)
        prev = state

    report.decision_values = dvals
    if keep_states:
        report.states = states
    return report


def run_loocv(ds: Dataset, spec: KernelSpec, C: float, strategy: str = "zero",
              config: SolverConfig | None = None, seed_config: SeedConfig | None = None,
              fold_seed: int | None = 0, kernel: Kernel | None = None) -> CvReport:
    if ds.n < 3:
        raise ValueError("leave-one-out needs at least 3 instances")
    plan = make_folds(ds, ds.n, fold_seed)
    return run_cv(ds, plan, spec, C, strategy, config, seed_config, kernel)
