"""Sparse-text datasets and deterministic k-fold partitioning.

Input lines look like ``<label> <dim>:<value> <dim>:<value> ...`` with
strictly increasing, 1-based feature dimensions.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


class ParseError(ValueError):
    """Raised for malformed sparse-text input. Carries the 1-based line."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnsupportedTaskError(ValueError):
    pass


class InvalidFoldCountError(ValueError):
    pass


@dataclass(frozen=True)
class Instance:
    id: int
    label: int
    features: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        if self.label not in (1, -1):
            raise ValueError(f"label must be +1 or -1, got {self.label!r}")
        dims = [d for d, _ in self.features]
        if any(b <= a for a, b in zip(dims, dims[1:])):
            raise ValueError("feature dimensions must be strictly increasing")
        if dims and dims[0] < 1:
            raise ValueError("feature dimensions must be positive")


@dataclass(frozen=True)
class Dataset:
    instances: tuple[Instance, ...]
    # Derived views for vectorised kernel evaluation; excluded from equality.
    X: sp.csr_matrix = field(init=False, compare=False, repr=False)
    y: np.ndarray = field(init=False, compare=False, repr=False)
    sq_norms: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        instances = tuple(self.instances)
        for pos, inst in enumerate(instances):
            if inst.id != pos:
                raise ValueError(f"instance ids must be 0..n-1, found {inst.id} at {pos}")
        object.__setattr__(self, "instances", instances)

        indptr = [0]
        indices: list[int] = []
        data: list[float] = []
        for inst in instances:
            for d, v in inst.features:
                indices.append(d)
                data.append(v)
            indptr.append(len(indices))
        max_dim = max(indices, default=0)
        X = sp.csr_matrix(
            (np.asarray(data, dtype=float), np.asarray(indices, dtype=np.int64),
             np.asarray(indptr, dtype=np.int64)),
            shape=(len(instances), max_dim + 1),
        )
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", np.array([i.label for i in instances], dtype=float))
        object.__setattr__(self, "sq_norms", np.asarray(X.multiply(X).sum(axis=1)).ravel())

    @property
    def n(self) -> int:
        return len(self.instances)

    @property
    def max_dim(self) -> int:
        return self.X.shape[1] - 1

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> Instance:
        return self.instances[i]

    @classmethod
    def from_arrays(cls, X: np.ndarray, y: Sequence[int]) -> "Dataset":
        """Build a dataset from a dense array, dropping exact zeros."""
        X = np.asarray(X, dtype=float)
        instances = []
        for i, (row, label) in enumerate(zip(X, y)):
            feats = tuple((d + 1, float(v)) for d, v in enumerate(row) if v != 0.0)
            instances.append(Instance(i, int(label), feats))
        return cls(tuple(instances))


def _parse_label(token: str) -> float | str:
    try:
        return float(token)
    except ValueError:
        return token


def map_labels(raw_labels: Iterable) -> dict:
    """Map exactly two distinct raw labels onto {+1, -1}; the larger one becomes +1.

    Numeric labels are ordered numerically, anything else by string order.
    """
    distinct = set(raw_labels)
    if len(distinct) != 2:
        raise UnsupportedTaskError(
            f"binary classification needs exactly 2 distinct labels, got {len(distinct)}"
        )
    if all(isinstance(v, (int, float)) for v in distinct):
        lo, hi = sorted(distinct)
    else:
        lo, hi = sorted(distinct, key=str)
    return {hi: 1, lo: -1}


def parse_dataset(source) -> Dataset:
    """Parse sparse text (a string, or any iterable of lines such as an open file)."""
    if isinstance(source, str):
        source = io.StringIO(source)

    rows: list[tuple[int, float | str, tuple[tuple[int, float], ...]]] = []
    for line_no, line in enumerate(source, start=1):
        line = line.strip()
        if not line:
            continue
        tokens = line.split()
        label = _parse_label(tokens[0])
        feats = []
        last = 0
        for tok in tokens[1:]:
            dim_s, sep, val_s = tok.partition(":")
            if not sep:
                raise ParseError(line_no, f"expected dim:value, got {tok!r}")
            try:
                dim = int(dim_s)
            except ValueError:
                raise ParseError(line_no, f"non-integer dimension {dim_s!r}") from None
            try:
                val = float(val_s)
            except ValueError:
                raise ParseError(line_no, f"non-numeric value {val_s!r}") from None
            if not np.isfinite(val):
                raise ParseError(line_no, f"non-finite value {val_s!r}")
            if dim <= last:
                raise ParseError(line_no, f"dimension {dim} not strictly increasing")
            last = dim
            feats.append((dim, val))
        rows.append((line_no, label, tuple(feats)))

    raw = {label for _, label, _ in rows}
    if raw <= {1.0, -1.0}:
        mapping = {1.0: 1, -1.0: -1}
    elif len(raw) == 2:
        mapping = map_labels(raw)
    elif len(raw) < 2:
        line_no, label, _ = rows[0]
        raise ParseError(line_no, f"invalid label {label!r}")
    else:
        raise UnsupportedTaskError(f"found {len(raw)} distinct labels; only binary is supported")

    instances = tuple(
        Instance(i, mapping[label], feats) for i, (_, label, feats) in enumerate(rows)
    )
    return Dataset(instances)


def load_dataset(path) -> Dataset:
    with open(path, encoding="utf-8") as fh:
        return parse_dataset(fh)


def dump_dataset(ds: Dataset) -> str:
    lines = []
    for inst in ds.instances:
        parts = ["+1" if inst.label == 1 else "-1"]
        parts.extend(f"{d}:{v!r}" for d, v in inst.features)
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


@dataclass(frozen=True)
class FoldPlan:
    k: int
    assignment: tuple[int, ...]
    seed: int | None

    def fold(self, index: int) -> np.ndarray:
        """Ids in 0-based fold ``index``, ascending."""
        a = np.asarray(self.assignment)
        return np.flatnonzero(a == index)

    def folds(self) -> list[np.ndarray]:
        return [self.fold(h) for h in range(self.k)]

    def sizes(self) -> list[int]:
        return np.bincount(np.asarray(self.assignment), minlength=self.k).tolist()


def make_folds(ds: Dataset | int, k: int, seed: int | None = 0) -> FoldPlan:
    """Shuffle-then-stripe fold assignment.

    With ``seed=None`` no shuffling happens and folds are contiguous blocks
    in file order. Either way fold sizes differ by at most one.
    """
    n = ds if isinstance(ds, int) else ds.n
    if k < 3:
        raise InvalidFoldCountError("k must be ≥ 3")
    if k > n:
        raise InvalidFoldCountError(f"k must be ≤ n ({n})")
    assignment = np.empty(n, dtype=np.int64)
    if seed is None:
        sizes = [n // k + (1 if h < n % k else 0) for h in range(k)]
        assignment[:] = np.repeat(np.arange(k), sizes)
    else:
        order = np.random.default_rng(seed).permutation(n)
        assignment[order] = np.arange(n) % k
    return FoldPlan(k=k, assignment=tuple(int(a) for a in assignment), seed=seed)
