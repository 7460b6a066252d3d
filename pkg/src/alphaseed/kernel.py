"""Gaussian and linear kernels over sparse instances, with an LRU row cache.

A cached row holds ``K(x_i, x_j)`` for every instance ``j`` in the dataset;
Q-matrix rows restricted to an id subset are derived from it on demand.
"""

from __future__ import annotations

import math
import os
import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .data_io import Dataset, Instance

DEFAULT_CACHE_BYTES = 256 * 1024 * 1024
CACHE_ENV_VAR = "ALPHASEED_CACHE_BYTES"
# Feature matrices up to this many entries are densified; numpy's dense
# products beat scipy's sparse ones by a wide margin on small inputs.
DENSE_FEATURE_LIMIT = 1 << 22


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "gaussian"
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "linear"):
            raise ValueError(f"unknown kernel kind {self.kind!r}")
        if self.kind == "gaussian" and not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError("gaussian kernel requires gamma > 0")


@dataclass(frozen=True)
class QRow:
    row_index: int
    ids: np.ndarray
    values: np.ndarray


def _sparse_dot(a: Instance, b: Instance) -> float:
    lookup = dict(b.features)
    return sum(v * lookup[d] for d, v in a.features if d in lookup)


def kernel_value(spec: KernelSpec, a: Instance, b: Instance) -> float:
    dot = _sparse_dot(a, b)
    if spec.kind == "linear":
        return dot
    sq = _sparse_dot(a, a) + _sparse_dot(b, b) - 2.0 * dot
    return math.exp(-spec.gamma * max(sq, 0.0))


def cache_budget_from_env(default: int = DEFAULT_CACHE_BYTES) -> int:
    raw = os.environ.get(CACHE_ENV_VAR)
    return int(raw) if raw else default


class Kernel:
    """Kernel evaluator bound to one dataset.

    Rows are evaluated against the whole dataset and kept in an LRU cache
    bounded by ``cache_bytes``. Access is guarded by a lock so several solver
    chains may share one instance.
    """

    def __init__(self, spec: KernelSpec, ds: Dataset, cache_bytes: int | None = None):
        self.spec = spec
        self.ds = ds
        self.cache_bytes = cache_budget_from_env() if cache_bytes is None else int(cache_bytes)
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()
        self._lock = threading.Lock()
        self._row_bytes = 8 * ds.n
        self.hits = 0
        self.misses = 0
        rows_, cols_ = ds.X.shape
        self._dense = ds.X.toarray() if rows_ * cols_ <= DENSE_FEATURE_LIMIT else None

    @property
    def capacity(self) -> int:
        """Number of rows the byte budget admits (at least one)."""
        return max(1, self.cache_bytes // max(self._row_bytes, 1))

    def _compute_rows(self, ids: np.ndarray) -> np.ndarray:
        ds = self.ds
        if self._dense is not None:
            dots = self._dense[ids] @ self._dense.T
        else:
            dots = (ds.X[ids] @ ds.X.T).toarray()
        if self.spec.kind == "linear":
            return dots
        sq = ds.sq_norms[ids][:, None] + ds.sq_norms[None, :] - 2.0 * dots
        np.maximum(sq, 0.0, out=sq)
        rows = np.exp(-self.spec.gamma * sq)
        rows[np.arange(ids.size), ids] = 1.0
        return rows

    def _compute_row(self, i: int) -> np.ndarray:
        ds = self.ds
        if self._dense is not None:
            dots = self._dense @ self._dense[i]
        else:
            X = ds.X
            lo, hi = X.indptr[i], X.indptr[i + 1]
            xi = np.zeros(X.shape[1])
            xi[X.indices[lo:hi]] = X.data[lo:hi]
            dots = X @ xi
        if self.spec.kind == "linear":
            return dots
        sq = ds.sq_norms[i] + ds.sq_norms - 2.0 * dots
        np.maximum(sq, 0.0, out=sq)
        row = np.exp(-self.spec.gamma * sq)
        row[i] = 1.0
        return row

    def _store(self, i: int, row: np.ndarray) -> None:
        # Caller holds the lock.
        row.setflags(write=False)
        self.misses += 1
        self._rows[i] = row
        while len(self._rows) > self.capacity:
            self._rows.popitem(last=False)

    def row(self, i: int) -> np.ndarray:
        """``K(x_i, x_j)`` for all j. The returned array must not be mutated."""
        if not 0 <= i < self.ds.n:
            raise IndexError(f"instance id {i} out of range")
        with self._lock:
            row = self._rows.get(i)
            if row is not None:
                self._rows.move_to_end(i)
                self.hits += 1
                return row
        row = self._compute_row(i)
        with self._lock:
            self._store(i, row)
        return row

    def rows(self, ids) -> np.ndarray:
        """Stacked kernel rows, shape ``(len(ids), n)``.

        Rows missing from the cache are evaluated in one batched product.
        """
        ids = np.asarray(ids, dtype=np.int64)
        if ids.size == 0:
            return np.zeros((0, self.ds.n))
        if ids.min() < 0 or ids.max() >= self.ds.n:
            raise IndexError("id set contains an out-of-range id")
        out = np.empty((ids.size, self.ds.n))
        missing = []
        with self._lock:
            for k, i in enumerate(ids.tolist()):
                row = self._rows.get(i)
                if row is None:
                    missing.append(k)
                else:
                    self._rows.move_to_end(i)
                    self.hits += 1
                    out[k] = row
        if missing:
            miss_ids = ids[missing]
            uniq, inv = np.unique(miss_ids, return_inverse=True)
            fresh = self._compute_rows(uniq)
            out[missing] = fresh[inv]
            with self._lock:
                for r, i in enumerate(uniq.tolist()):
                    self._store(i, fresh[r].copy())
        return out

    def block(self, row_ids, col_ids) -> np.ndarray:
        col_ids = np.asarray(col_ids, dtype=np.int64)
        return self.rows(row_ids)[:, col_ids]

    def value(self, i: int, j: int) -> float:
        return float(self.row(i)[j])

    def q_row(self, i: int, ids) -> QRow:
        ids = np.asarray(ids, dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= self.ds.n):
            raise IndexError("id set contains an out-of-range id")
        y = self.ds.y
        values = y[i] * y[ids] * self.row(i)[ids]
        return QRow(row_index=i, ids=ids, values=values)

    def clear(self) -> None:
        with self._lock:
            self._rows.clear()


def q_row(spec: KernelSpec, ds: Dataset, i: int, ids, cache: Kernel | None = None) -> QRow:
    """Q-matrix row ``y_i y_j K(x_i, x_j)`` over ``ids``.

    Pass a :class:`Kernel` as ``cache`` to reuse rows between calls.
    """
    if cache is None:
        cache = Kernel(spec, ds, cache_bytes=0)
    elif cache.spec != spec or cache.ds is not ds:
        raise ValueError("cache is bound to a different kernel or dataset")
    return cache.q_row(i, ids)
