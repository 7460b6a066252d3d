"""SVD-based least squares and Moore-Penrose pseudo-inverse for small dense systems."""

from __future__ import annotations

import numpy as np


class NumericError(ValueError):
    pass


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise NumericError(f"expected a 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NumericError("matrix has non-finite entries")
    return A


def _truncated_svd(A: np.ndarray):
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0:
        return U, s, Vt, s
    tol = max(A.shape) * np.finfo(float).eps * s[0]
    inv = np.zeros_like(s)
    keep = s > tol
    inv[keep] = 1.0 / s[keep]
    return U, s, Vt, inv


def pseudo_inverse(A) -> np.ndarray:
    A = _as_matrix(A)
    if A.size == 0:
        return np.zeros(A.shape[::-1])
    U, _, Vt, inv = _truncated_svd(A)
    return (Vt.T * inv) @ U.T


def solve_least_squares(A, b) -> np.ndarray:
    """Minimum-norm minimiser of ``||A x - b||``.

    Singular values below ``max(m, p) * eps * sigma_max`` are treated as zero,
    so rank-deficient systems get the pseudo-inverse solution.
    """
    A = _as_matrix(A)
    b = np.asarray(b, dtype=float).ravel()
    m, p = A.shape
    if m < 1 or p < 1:
        raise NumericError("least squares needs at least one row and one column")
    if b.shape != (m,):
        raise NumericError(f"rhs has length {b.size}, expected {m}")
    if not np.all(np.isfinite(b)):
        raise NumericError("rhs has non-finite entries")
    U, _, Vt, inv = _truncated_svd(A)
    return Vt.T @ (inv * (U.T @ b))
