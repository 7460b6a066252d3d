import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alphaseed.data_io import Dataset, Instance, parse_dataset
from alphaseed.kernel import Kernel, KernelSpec, kernel_value, q_row
from conftest import random_problem
from oracles import gaussian_gram


def test_gaussian_identical_is_one():
    a = Instance(0, 1, ((1, 0.3), (4, -2.0)))
    assert kernel_value(KernelSpec("gaussian", 0.7), a, a) == 1.0


def test_gaussian_unit_distance():
    a = Instance(0, 1, ())
    b = Instance(1, 1, ((1, 1.0),))
    assert kernel_value(KernelSpec("gaussian", 0.5), a, b) == pytest.approx(0.606531, abs=1e-6)


def test_linear_sparse_dot():
    a = Instance(0, 1, ((1, 2.0),))
    b = Instance(1, 1, ((1, 3.0), (2, 5.0)))
    assert kernel_value(KernelSpec("linear"), a, b) == 6.0


def test_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec("gaussian", 0.0)
    with pytest.raises(ValueError):
        KernelSpec("poly", 1.0)


def test_q_row_diagonal_and_sign():
    # K(x0, x1) = exp(-ln2) = 0.5
    ds = parse_dataset("+1 1:0\n-1 1:1\n+1 1:3")
    spec = KernelSpec("gaussian", math.log(2))
    row = q_row(spec, ds, 0, [0, 1, 2])
    assert row.values[0] == 1.0
    assert row.values[1] == pytest.approx(-0.5)


def test_q_row_matches_elementwise_oracle():
    ds = parse_dataset("+1 1:0.2 2:1\n-1 1:-1\n-1 2:0.5")
    spec = KernelSpec("gaussian", 0.8)
    for i in range(3):
        row = q_row(spec, ds, i, [0, 1, 2])
        expected = [ds.y[i] * ds.y[j] * kernel_value(spec, ds[i], ds[j]) for j in range(3)]
        assert np.allclose(row.values, expected, rtol=0, atol=1e-14)


def test_out_of_range():
    ds = parse_dataset("+1 1:0\n-1 1:1")
    k = Kernel(KernelSpec("gaussian", 1.0), ds)
    with pytest.raises(IndexError):
        k.row(2)
    with pytest.raises(IndexError):
        k.q_row(0, [0, 5])


def test_gram_matches_dense_oracle():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(20, 3))
    ds = Dataset.from_arrays(X, np.where(np.arange(20) % 2, 1, -1))
    k = Kernel(KernelSpec("gaussian", 0.3), ds)
    assert np.allclose(k.rows(np.arange(20)), gaussian_gram(X, 0.3), atol=1e-13)


def test_cached_and_uncached_bit_identical():
    ds = random_problem(np.random.default_rng(0), 40, dim=5)
    spec = KernelSpec("gaussian", 0.4)
    cached = Kernel(spec, ds)
    tiny = Kernel(spec, ds, cache_bytes=0)
    for i in [3, 7, 3, 12, 7, 3]:
        assert np.array_equal(cached.q_row(i, np.arange(40)).values, tiny.q_row(i, np.arange(40)).values)
    assert cached.hits > 0
    assert np.array_equal(cached.rows([3, 7]), np.vstack([tiny.row(3), tiny.row(7)]))


def test_lru_eviction_respects_budget():
    ds = random_problem(np.random.default_rng(1), 10)
    k = Kernel(KernelSpec("gaussian", 1.0), ds, cache_bytes=8 * 10 * 3)
    for i in range(10):
        k.row(i)
    assert k.capacity == 3
    assert len(k._rows) == 3
    assert list(k._rows) == [7, 8, 9]


def test_env_override(monkeypatch):
    monkeypatch.setenv("ALPHASEED_CACHE_BYTES", "1234")
    ds = random_problem(np.random.default_rng(1), 5)
    assert Kernel(KernelSpec(), ds).cache_bytes == 1234


@given(st.integers(2, 50), st.integers(0, 10_000), st.sampled_from(["gaussian", "linear"]))
@settings(max_examples=30, deadline=None)
def test_q_symmetry_and_bounds(n, seed, kind):
    ds = random_problem(np.random.default_rng(seed), n)
    k = Kernel(KernelSpec(kind, 0.5), ds)
    Q = np.vstack([k.q_row(i, np.arange(n)).values for i in range(n)])
    assert np.array_equal(Q, Q.T) or np.allclose(Q, Q.T, rtol=0, atol=1e-14)
    if kind == "gaussian":
        assert np.all(np.abs(Q) <= 1.0)
        assert np.all(np.diag(Q) == 1.0)
