"""Warm-started kernel SVM training for fast k-fold cross-validation."""

from .cross_validation import CvReport, FoldMetrics, run_cv, run_loocv
from .data_io import Dataset, FoldPlan, Instance, load_dataset, make_folds, parse_dataset
from .kernel import Kernel, KernelSpec
from .seeding import STRATEGIES, FoldTransition, SeedConfig, SeedResult, make_transition, seed
from .solver import SolverConfig, SvmState, init_state, kkt_gap, solve

__all__ = [
    "CvReport", "FoldMetrics", "run_cv", "run_loocv",
    "Dataset", "FoldPlan", "Instance", "load_dataset", "make_folds", "parse_dataset",
    "Kernel", "KernelSpec",
    "STRATEGIES", "FoldTransition", "SeedConfig", "SeedResult", "make_transition", "seed",
    "SolverConfig", "SvmState", "init_state", "kkt_gap", "solve",
]
