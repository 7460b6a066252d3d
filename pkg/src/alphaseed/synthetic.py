"""Synthetic datasets for experiments and tests."""

from __future__ import annotations

import numpy as np

from .data_io import Dataset


def make_blobs(n: int = 300, seed: int = 0, spread: float = 1.0, separation: float = 4.0) -> Dataset:
    """Two isotropic 2-D Gaussian blobs centred at ``(+-s/2, +-s/2)``.

    Labels alternate so the classes differ in size by at most one.
    """
    rng = np.random.default_rng(seed)
    y = np.where(np.arange(n) % 2 == 0, 1, -1)
    centre = separation / 2.0
    X = rng.normal(scale=spread, size=(n, 2)) + centre * y[:, None]
    return Dataset.from_arrays(X, y)
