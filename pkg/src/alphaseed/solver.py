"""Warm-startable SMO for the kernel SVM dual.

The dual is ``max sum(a) - a'Qa/2`` subject to ``0 <= a <= C`` and
``sum(y a) = 0``, with ``Q_ij = y_i y_j K(x_i, x_j)``. Each instance carries
an optimality indicator ``f_i = sum_j a_j y_j K_ij - y_i``; the solver stops
once ``max f over I_l+I_m`` minus ``min f over I_u+I_m`` is within epsilon.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .data_io import Instance
from .kernel import Kernel, kernel_value

TAU = 1e-12


class FeasibilityError(ValueError):
    pass


class StateError(ValueError):
    pass


@dataclass
class SolverConfig:
    epsilon: float = 1e-3
    max_iterations: int = 10_000_000
    cache_bytes: int | None = None
    refresh_interval: int = 1000
    record_objective: bool = False
    selection: str = "second-order"

    def __post_init__(self):
        if self.selection not in ("first-order", "second-order"):
            raise ValueError(f"unknown working-set selection {self.selection!r}")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be non-negative")


@dataclass
class IndexPartition:
    I_u: np.ndarray
    I_m: np.ndarray
    I_l: np.ndarray


@dataclass
class SvmState:
    kernel: Kernel
    active_ids: np.ndarray
    y: np.ndarray
    alpha: np.ndarray
    f: np.ndarray
    C: float
    b: float = 0.0
    iterations: int = 0
    converged: bool = False
    max_drift: float = 0.0
    objective_trace: list[float] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.active_ids)

    def alpha_of(self, ids) -> np.ndarray:
        """Alpha values looked up by dataset id."""
        return self.alpha[self.positions(ids)]

    def positions(self, ids) -> np.ndarray:
        ids = np.asarray(ids, dtype=np.int64)
        pos = np.searchsorted(self.active_ids, ids)
        if ids.size and (np.any(pos >= self.n) or np.any(self.active_ids[np.minimum(pos, self.n - 1)] != ids)):
            raise KeyError("id not in the active set")
        return pos

    def copy(self) -> "SvmState":
        new = copy.copy(self)
        new.alpha = self.alpha.copy()
        new.f = self.f.copy()
        new.objective_trace = list(self.objective_trace)
        return new


def _up_mask(y, alpha, C):
    return ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))


def _low_mask(y, alpha, C):
    return ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))


def partition(state: SvmState) -> IndexPartition:
    a, y, C = state.alpha, state.y, state.C
    free = (a > 0) & (a < C)
    upper = ((y > 0) & (a == 0)) | ((y < 0) & (a == C))
    lower = ((y > 0) & (a == C)) | ((y < 0) & (a == 0))
    ids = state.active_ids
    return IndexPartition(I_u=ids[upper], I_m=ids[free], I_l=ids[lower])


def kkt_gap(state: SvmState) -> float:
    """``max{f: I_l+I_m} - min{f: I_u+I_m}``; non-positive gaps mean optimal."""
    up = _up_mask(state.y, state.alpha, state.C)
    low = _low_mask(state.y, state.alpha, state.C)
    if not up.any() or not low.any():
        return -np.inf
    return float(state.f[low].max() - state.f[up].min())


def full_indicators(kernel: Kernel, active_ids: np.ndarray, y: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    sv = np.flatnonzero(alpha > 0)
    f = -y.copy()
    if sv.size:
        K = kernel.rows(active_ids[sv])[:, active_ids]
        f += K.T @ (alpha[sv] * y[sv])
    return f


def kernel_diagonal(kernel: Kernel, ids: np.ndarray) -> np.ndarray:
    if kernel.spec.kind == "gaussian":
        return np.ones(ids.size)
    return kernel.ds.sq_norms[ids].copy()


def init_state(kernel: Kernel, active_ids, C: float, alpha0=None) -> SvmState:
    """Build a state from a feasible starting alpha, recomputing every f_i."""
    active_ids = np.asarray(active_ids, dtype=np.int64)
    if active_ids.size == 0:
        raise StateError("empty active set")
    if np.any(np.diff(active_ids) <= 0):
        raise ValueError("active_ids must be strictly increasing")
    if not C > 0:
        raise ValueError("C must be positive")
    y = kernel.ds.y[active_ids].copy()
    n = active_ids.size
    alpha = np.zeros(n) if alpha0 is None else np.array(alpha0, dtype=float)
    if alpha.shape != (n,):
        raise FeasibilityError(f"alpha0 has shape {alpha.shape}, expected ({n},)")
    if np.any(alpha < 0) or np.any(alpha > C):
        bad = int(np.flatnonzero((alpha < 0) | (alpha > C))[0])
        raise FeasibilityError(
            f"box constraint violated: alpha[{bad}] = {alpha[bad]!r} outside [0, {C}]"
        )
    residual = float(np.dot(y, alpha))
    if abs(residual) > 1e-9 * C * n:
        raise FeasibilityError(f"equality constraint violated: sum(y*alpha) = {residual!r}")
    f = full_indicators(kernel, active_ids, y, alpha)
    return SvmState(kernel=kernel, active_ids=active_ids, y=y, alpha=alpha, f=f, C=float(C))


def objective(state: SvmState) -> float:
    """Dual objective, using ``(Q a)_i = y_i f_i + 1``."""
    return float(0.5 * np.dot(state.alpha, 1.0 - state.y * state.f))


def compute_bias(state: SvmState) -> float:
    if state.n == 0:
        raise StateError("empty active set")
    a, y, f, C = state.alpha, state.y, state.f, state.C
    free = (a > 0) & (a < C)
    if free.any():
        return float(f[free].mean())
    upper = ((y > 0) & (a == 0)) | ((y < 0) & (a == C))
    lower = ((y > 0) & (a == C)) | ((y < 0) & (a == 0))
    if upper.any() and lower.any():
        return float((f[upper].min() + f[lower].max()) / 2)
    return float(f[upper].min() if upper.any() else f[lower].max())


def solve(state: SvmState, config: SolverConfig | None = None) -> SvmState:
    """Run SMO until the KKT gap is within epsilon.

    ``i`` is always the minimiser of f over the up set. With second-order
    selection ``j`` maximises the guaranteed objective gain among violating
    partners; with first-order selection ``j`` is the arg-max of f over the
    low set (the maximal violating pair). Returns a new state; ``converged`` is False if ``max_iterations`` ran out.
    """
    config = config or SolverConfig()
    state = state.copy()
    ids, y, alpha, f, C = state.active_ids, state.y, state.alpha, state.f, state.C
    kernel = state.kernel
    up = _up_mask(y, alpha, C)
    low = _low_mask(y, alpha, C)
    eps = config.epsilon
    second_order = config.selection == "second-order"
    diag = kernel_diagonal(kernel, ids) if second_order else None
    done = 0
    state.converged = False
    if config.record_objective and not state.objective_trace:
        state.objective_trace.append(objective(state))

    while True:
        if not up.any() or not low.any():
            state.converged = True
            break
        i = int(np.argmin(np.where(up, f, np.inf)))
        j = int(np.argmax(np.where(low, f, -np.inf)))
        if f[j] - f[i] <= eps:
            state.converged = True
            break
        if done >= config.max_iterations:
            break

        Ki = kernel.row(int(ids[i]))[ids]
        if second_order:
            # Largest guaranteed objective gain among violating partners of i.
            curv = Ki[i] + diag - 2.0 * Ki
            curv = np.where(curv > 0, curv, TAU)
            gain_f = f - f[i]
            score = np.where(low & (gain_f > 0), gain_f * gain_f / curv, -np.inf)
            j = int(np.argmax(score))
        Kj = kernel.row(int(ids[j]))[ids]
        curvature = Ki[i] + Kj[j] - 2.0 * Ki[j]
        if curvature <= 0:
            curvature = TAU
        cap_i = C - alpha[i] if y[i] > 0 else alpha[i]
        cap_j = alpha[j] if y[j] > 0 else C - alpha[j]
        t = min((f[j] - f[i]) / curvature, cap_i, cap_j)

        if t == cap_i:
            alpha[i] = C if y[i] > 0 else 0.0
        else:
            alpha[i] += y[i] * t
        if t == cap_j:
            alpha[j] = 0.0 if y[j] > 0 else C
        else:
            alpha[j] -= y[j] * t
        f += t * (Ki - Kj)

        for p in (i, j):
            up[p] = (alpha[p] < C) if y[p] > 0 else (alpha[p] > 0)
            low[p] = (alpha[p] > 0) if y[p] > 0 else (alpha[p] < C)

        done += 1
        state.iterations += 1
        if config.record_objective:
            state.objective_trace.append(objective(state))
        if config.refresh_interval and done % config.refresh_interval == 0:
            fresh = full_indicators(kernel, ids, y, alpha)
            state.max_drift = max(state.max_drift, float(np.max(np.abs(fresh - f))))
            f[:] = fresh

    state.b = compute_bias(state)
    return state


def decision_values(state: SvmState, ids) -> np.ndarray:
    """``sum_j a_j y_j K(x, x_j) - b`` for dataset instances ``ids``."""
    ids = np.asarray(ids, dtype=np.int64)
    sv = np.flatnonzero(state.alpha > 0)
    out = np.full(ids.size, -state.b)
    if sv.size and ids.size:
        K = state.kernel.rows(state.active_ids[sv])[:, ids]
        out += (state.alpha[sv] * state.y[sv]) @ K
    return out


def predict_ids(state: SvmState, ids) -> np.ndarray:
    return np.where(decision_values(state, ids) >= 0, 1, -1)


def predict(state: SvmState, x: Instance) -> int:
    """Label of an arbitrary instance; a decision value of exactly 0 maps to +1."""
    ds = state.kernel.ds
    spec = state.kernel.spec
    total = -state.b
    for pos in np.flatnonzero(state.alpha > 0):
        j = int(state.active_ids[pos])
        total += state.alpha[pos] * state.y[pos] * kernel_value(spec, x, ds[j])
    return 1 if total >= 0 else -1
