"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math

import numpy as np


def gaussian_gram(X: np.ndarray, gamma: float) -> np.ndarray:
    """Dense Gram matrix by explicit pairwise distances."""
    n = len(X)
    K = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            d = X[i] - X[j]
            K[i, j] = math.exp(-gamma * float(d @ d))
    return K


def dual_objective(alpha: np.ndarray, Q: np.ndarray) -> float:
    return float(alpha.sum() - 0.5 * alpha @ Q @ alpha)


def brute_force_dual(Q: np.ndarray, y: np.ndarray, C: float, tol: float = 1e-9):
    """Maximise the box- and equality-constrained dual by enumerating faces.

    Every variable is fixed at 0, fixed at C, or free. On each face the
    stationarity system of the equality-constrained problem is solved with
    least squares; stationary points that are feasible are candidates. The
    best candidate is the global optimum because the objective is concave.
    """
    n = len(y)
    best_val, best_alpha = -np.inf, None
    for status in itertools.product((0, 1, 2), repeat=n):
        status = np.array(status)
        free = np.flatnonzero(status == 2)
        alpha = np.where(status == 1, C, 0.0)
        fixed = np.flatnonzero(status != 2)
        if free.size:
            m = free.size
            A = np.zeros((m + 1, m + 1))
            A[:m, :m] = Q[np.ix_(free, free)]
            A[:m, m] = y[free]
            A[m, :m] = y[free]
            rhs = np.empty(m + 1)
            rhs[:m] = 1.0 - Q[np.ix_(free, fixed)] @ alpha[fixed]
            rhs[m] = -float(y[fixed] @ alpha[fixed])
            sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            if np.abs(A @ sol - rhs).max() > 1e-8:
                continue
            alpha[free] = sol[:m]
        if alpha.min() < -tol or alpha.max() > C + tol or abs(y @ alpha) > 1e-8:
            continue
        alpha = np.clip(alpha, 0.0, C)
        val = dual_objective(alpha, Q)
        if val > best_val:
            best_val, best_alpha = val, alpha
    return best_val, best_alpha
