"""Alpha seeding between consecutive cross-validation rounds.

Moving from round h to round h+1 removes the instances ``R`` (the next test
fold) and adds ``T`` (the previous test fold); everything else, ``S``, is
shared. Each strategy maps the previous converged state to a feasible initial
alpha over ``S + T``:

``zero``  all alphas start at 0.
``ato``   shrink alpha_R to 0 while growing alpha_T, re-solving the free
          alphas so they stay on the margin, in steps bounded by the first
          KKT crossing.
``mir``   keep alpha_S, fit alpha_T by least squares so the indicators of S
          move to (or stay on) the margin.
``sir``   hand each removed support vector's alpha to the most similar
          same-label instance in T.
``avg``   spread each removed alpha uniformly over the free instances of S.
``top``   push each removed alpha onto the most similar instances of S.

Every strategy finishes by restoring ``sum(y * alpha) = 0`` with the
water-filling adjustment in :func:`adjust_alpha_t`.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .data_io import FoldPlan
from .linalg import solve_least_squares
from .solver import SvmState

STRATEGIES = ("zero", "ato", "mir", "sir", "avg", "top")


class InfeasibleAdjustmentError(ValueError):
    pass


@dataclass(frozen=True)
class FoldTransition:
    I_S: np.ndarray
    I_R: np.ndarray
    I_T: np.ndarray

    def __post_init__(self):
        for name in ("I_S", "I_R", "I_T"):
            object.__setattr__(self, name, np.sort(np.asarray(getattr(self, name), dtype=np.int64)))
        if (np.intersect1d(self.I_S, self.I_R).size or np.intersect1d(self.I_S, self.I_T).size
                or np.intersect1d(self.I_R, self.I_T).size):
            raise ValueError("I_S, I_R and I_T must be pairwise disjoint")

    @property
    def previous_ids(self) -> np.ndarray:
        return np.union1d(self.I_S, self.I_R)

    @property
    def next_ids(self) -> np.ndarray:
        return np.union1d(self.I_S, self.I_T)


@dataclass
class SeedConfig:
    rng_seed: int = 0
    ato_max_rounds: int = 100
    # Slack when deciding that an added instance already meets its KKT condition.
    ato_tolerance: float = 1e-3


@dataclass
class AtoWork:
    eta: list[float] = field(default_factory=list)
    removed_mass: list[float] = field(default_factory=list)
    outer_rounds: int = 0
    hit_cap: bool = False
    Phi: np.ndarray | None = None
    delta_alpha_T: np.ndarray | None = None
    delta_alpha_R: np.ndarray | None = None
    delta_alpha_M: np.ndarray | None = None


@dataclass
class SeedResult:
    ids: np.ndarray
    alpha_prime: np.ndarray
    strategy: str
    init_seconds: float = 0.0
    constraint_residual: float = 0.0
    work: AtoWork | None = None


def make_transition(plan: FoldPlan, h: int) -> FoldTransition:
    """Transition from round ``h`` to ``h + 1`` (1-based): T is fold h, R is fold h+1."""
    if not 1 <= h <= plan.k - 1:
        raise ValueError(f"h must be in 1..{plan.k - 1}, got {h}")
    a = np.asarray(plan.assignment)
    I_T = np.flatnonzero(a == h - 1)
    I_R = np.flatnonzero(a == h)
    I_S = np.flatnonzero((a != h - 1) & (a != h))
    return FoldTransition(I_S=I_S, I_R=I_R, I_T=I_T)


def adjust_alpha_t(alpha_T, y_T, target: float, C: float) -> np.ndarray:
    """Clip to ``[0, C]``, then shift every ``y_t * alpha_t`` uniformly until
    ``sum(y_T * alpha_T) == target``, freezing entries as they hit a bound.
    """
    a = np.clip(np.array(alpha_T, dtype=float), 0.0, C)
    y = np.asarray(y_T, dtype=float)
    n = a.size
    tol = 1e-12 * C * max(n, 1)
    lo = -C * np.count_nonzero(y < 0)
    hi = C * np.count_nonzero(y > 0)
    if target < lo - tol or target > hi + tol:
        raise InfeasibleAdjustmentError(
            f"target {target!r} outside achievable range [{lo}, {hi}]"
        )
    for _ in range(2 * n + 2):
        diff = target - float(np.dot(y, a))
        if abs(diff) <= tol:
            break
        up = diff > 0
        # Room each entry has to move y_t * a_t in the direction of diff.
        room = np.where(y > 0, C - a, a) if up else np.where(y > 0, a, C - a)
        movable = np.flatnonzero(room > 0)
        if movable.size == 0:
            break
        step = abs(diff) / movable.size
        limit = room[movable].min()
        sign = 1.0 if up else -1.0
        if step < limit:
            a[movable] += sign * y[movable] * step
            continue
        a[movable] += sign * y[movable] * limit
        hit = movable[room[movable] == limit]
        a[hit] = np.where((y[hit] > 0) == up, C, 0.0)
    return a


def _shift_balance(alpha, y, C, pos, delta) -> float:
    """Move ``sum(y*alpha)`` over ``pos`` by up to ``delta``; returns what did not fit."""
    if pos.size == 0 or delta == 0:
        return delta
    current = float(np.dot(y[pos], alpha[pos]))
    lo = -C * np.count_nonzero(y[pos] < 0)
    hi = C * np.count_nonzero(y[pos] > 0)
    target = min(max(current + delta, lo), hi)
    alpha[pos] = adjust_alpha_t(alpha[pos], y[pos], target, C)
    return current + delta - target


def _rebalance(alpha, y, C, groups) -> None:
    """Restore ``sum(y*alpha) = 0`` by adjusting the first feasible position group."""
    total = float(np.dot(y, alpha))
    if abs(total) <= 1e-12 * C * max(alpha.size, 1):
        return
    for pos in groups:
        pos = np.unique(pos)
        rest = total - float(np.dot(y[pos], alpha[pos]))
        try:
            alpha[pos] = adjust_alpha_t(alpha[pos], y[pos], -rest, C)
            return
        except InfeasibleAdjustmentError:
            continue
    raise InfeasibleAdjustmentError("no group of instances can absorb the imbalance")


class _Assembly:
    """Alpha over the next training set, ``ids = S + T`` sorted, with position maps."""

    def __init__(self, prev: SvmState, trans: FoldTransition):
        self.ids = trans.next_ids
        self.y = prev.kernel.ds.y[self.ids]
        self.alpha = np.zeros(self.ids.size)
        self.S = np.searchsorted(self.ids, trans.I_S)
        self.T = np.searchsorted(self.ids, trans.I_T)
        self.alpha[self.S] = prev.alpha_of(trans.I_S)
        self.C = prev.C

    def residual(self) -> float:
        return abs(float(np.dot(self.y, self.alpha)))

    def free_S(self) -> np.ndarray:
        a = self.alpha[self.S]
        return self.S[(a > 0) & (a < self.C)]

    def finish(self, strategy, groups, t0, work=None) -> SeedResult:
        residual = self.residual()
        everything = np.arange(self.ids.size)
        _rebalance(self.alpha, self.y, self.C, list(groups) + [everything])
        return SeedResult(
            ids=self.ids, alpha_prime=self.alpha, strategy=strategy,
            init_seconds=time.perf_counter() - t0, constraint_residual=residual, work=work,
        )


def seed_zero(trans: FoldTransition, C: float) -> SeedResult:
    ids = trans.next_ids
    return SeedResult(ids=ids, alpha_prime=np.zeros(ids.size), strategy="zero")


def seed_sir(prev: SvmState, trans: FoldTransition, config: SeedConfig | None = None,
             rng: np.random.Generator | None = None) -> SeedResult:
    t0 = time.perf_counter()
    config = config or SeedConfig()
    rng = rng if rng is not None else np.random.default_rng(config.rng_seed)
    asm = _Assembly(prev, trans)
    kernel = prev.kernel
    y = kernel.ds.y
    alpha_R = prev.alpha_of(trans.I_R)
    y_T = y[trans.I_T]
    used = np.zeros(trans.I_T.size, dtype=bool)
    alpha_T = np.zeros(trans.I_T.size)

    # Largest weights pick first; ties by id.
    for k in np.lexsort((trans.I_R, -alpha_R)):
        a_p = alpha_R[k]
        if a_p == 0:
            break
        if used.all():
            break
        p = int(trans.I_R[k])
        same = ~used & (y_T == y[p])
        if same.any():
            K_p = kernel.row(p)[trans.I_T]
            q = int(np.argmax(np.where(same, K_p, -np.inf)))
        else:
            q = int(rng.choice(np.flatnonzero(~used)))
        alpha_T[q] = a_p
        used[q] = True

    asm.alpha[asm.T] = alpha_T
    return asm.finish("sir", [asm.T, np.concatenate([asm.T, asm.free_S()])], t0)


def seed_mir(prev: SvmState, trans: FoldTransition, config: SeedConfig | None = None) -> SeedResult:
    t0 = time.perf_counter()
    asm = _Assembly(prev, trans)
    if trans.I_T.size == 0:
        return asm.finish("mir", [asm.free_S()], t0)

    kernel = prev.kernel
    y = kernel.ds.y
    S, R, T = trans.I_S, trans.I_R, trans.I_T
    C, b = prev.C, prev.b
    alpha_S = prev.alpha_of(S)
    alpha_R = prev.alpha_of(R)
    f_S = prev.f[prev.positions(S)]

    # Free instances of S stay on the margin; bounded ones are pulled to it.
    free = (alpha_S > 0) & (alpha_S < C)
    delta_f = np.where(free, 0.0, b - f_S)

    K_TS = kernel.rows(T)[:, S]
    Q_ST = (y[S][:, None] * y[T][None, :]) * K_TS.T
    rhs = y[S] * delta_f
    sv_R = alpha_R > 0
    if sv_R.any():
        K_RS = kernel.rows(R[sv_R])[:, S]
        rhs = rhs + y[S] * (K_RS.T @ (y[R][sv_R] * alpha_R[sv_R]))
    A = np.vstack([Q_ST, y[T][None, :]])
    rhs = np.append(rhs, np.dot(y[R], alpha_R))

    alpha_T = solve_least_squares(A, rhs)
    asm.alpha[asm.T] = alpha_T
    residual = asm.residual()
    target = -float(np.dot(y[S], alpha_S))
    try:
        asm.alpha[asm.T] = adjust_alpha_t(alpha_T, y[T], target, C)
    except InfeasibleAdjustmentError:
        asm.alpha[asm.T] = np.clip(alpha_T, 0.0, C)
    result = asm.finish("mir", [np.concatenate([asm.T, asm.free_S()])], t0)
    result.constraint_residual = residual
    return result


def seed_ato(prev: SvmState, trans: FoldTransition, config: SeedConfig | None = None) -> SeedResult:
    t0 = time.perf_counter()
    config = config or SeedConfig()
    kernel = prev.kernel
    ds_y = kernel.ds.y
    C, b = prev.C, prev.b
    tol = config.ato_tolerance

    # Work over U = previous training ids followed by T.
    U = np.concatenate([prev.active_ids, trans.I_T])
    nX = prev.n
    y = ds_y[U]
    alpha = np.concatenate([prev.alpha, np.zeros(trans.I_T.size)])
    f = np.empty(U.size)
    f[:nX] = prev.f
    if trans.I_T.size:
        sv = np.flatnonzero(prev.alpha > 0)
        K_TX = kernel.rows(trans.I_T)[:, prev.active_ids[sv]]
        f[nX:] = K_TX @ (prev.alpha[sv] * prev.y[sv]) - y[nX:]

    in_R = np.zeros(U.size, dtype=bool)
    in_R[:nX] = np.isin(prev.active_ids, trans.I_R)
    in_R &= alpha > 0
    in_X = np.zeros(U.size, dtype=bool)
    in_X[:nX] = ~np.isin(prev.active_ids, trans.I_R)
    in_T = np.zeros(U.size, dtype=bool)
    in_T[nX:] = True

    # Added instances already optimal at alpha = 0 join the training set directly.
    satisfied0 = np.where(y > 0, f >= b - tol, f <= b + tol)
    move = in_T & satisfied0
    in_T &= ~move
    in_X |= move

    work = AtoWork()
    for _ in range(config.ato_max_rounds):
        if not in_R.any():
            break
        Tp = np.flatnonzero(in_T)
        Rp = np.flatnonzero(in_R)
        Mp = np.flatnonzero(in_X & (alpha > 0) & (alpha < C))
        dT = C - alpha[Tp]
        aR = alpha[Rp]

        K_T = kernel.rows(U[Tp])[:, U]
        K_R = kernel.rows(U[Rp])[:, U]
        # g = change of f per unit step, before the M correction.
        g = K_T.T @ (y[Tp] * dT) - K_R.T @ (y[Rp] * aR)
        Phi = np.zeros(Mp.size)
        if Mp.size:
            K_M = kernel.rows(U[Mp])[:, U]
            yM = y[Mp]
            A = np.vstack([yM[None, :], yM[:, None] * yM[None, :] * K_M[:, Mp]])
            rhs = np.concatenate([[np.dot(y[Tp], dT) - np.dot(y[Rp], aR)], yM * g[Mp]])
            Phi = solve_least_squares(A, rhs)
            g = g - K_M.T @ (yM * Phi)

        # Step size: first bounded instance of X' whose f reaches b, at most a full step.
        eta = 1.0
        bounded = in_X & ~((alpha > 0) & (alpha < C))
        upper = bounded & np.where(y > 0, alpha == 0, alpha == C)
        lower = bounded & ~upper
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = (b - f) / g
        hits = ((upper & (f >= b) & (g < 0)) | (lower & (f <= b) & (g > 0))) & (cand > 0)
        if hits.any():
            eta = min(eta, float(cand[hits].min()))
        # Box limits on alpha_M - eta * Phi.
        with np.errstate(divide="ignore", invalid="ignore"):
            room = np.where(Phi > 0, alpha[Mp] / Phi, np.where(Phi < 0, (alpha[Mp] - C) / Phi, np.inf))
        limit_pos = None
        if room.size and room.min() < eta:
            eta = float(room.min())
            limit_pos = Mp[room == eta]

        alpha[Tp] = C if eta == 1.0 else alpha[Tp] + eta * dT
        alpha[Rp] = 0.0 if eta == 1.0 else alpha[Rp] * (1.0 - eta)
        if Mp.size:
            alpha[Mp] = np.clip(alpha[Mp] - eta * Phi, 0.0, C)
            if limit_pos is not None:
                phi_at = Phi[np.searchsorted(Mp, limit_pos)]
                alpha[limit_pos] = np.where(phi_at > 0, 0.0, C)
        f += eta * g

        work.eta.append(eta)
        work.Phi = Phi
        work.delta_alpha_T = eta * dT
        work.delta_alpha_R = -eta * aR
        work.delta_alpha_M = -eta * Phi
        in_R &= alpha > 0
        work.removed_mass.append(float(alpha[in_R].sum()))
        work.outer_rounds += 1

        free_t = in_T & (alpha > 0) & (alpha < C) & (np.abs(f - b) <= tol)
        in_T &= ~free_t
        in_X |= free_t

    work.hit_cap = bool(in_R.any())

    asm = _Assembly(prev, trans)
    keep = np.flatnonzero(~np.isin(U, trans.I_R))
    asm.alpha[np.searchsorted(asm.ids, U[keep])] = alpha[keep]
    return asm.finish("ato", [np.concatenate([asm.T, asm.free_S()])], t0, work=work)


def _redistribute_removed(prev: SvmState, trans: FoldTransition, strategy: str) -> SeedResult:
    t0 = time.perf_counter()
    asm = _Assembly(prev, trans)
    kernel = prev.kernel
    y_ds = kernel.ds.y
    C = asm.C
    alpha_R = prev.alpha_of(trans.I_R)
    S = asm.S
    for r, a_r in zip(trans.I_R, alpha_R):
        if a_r == 0:
            continue
        # Removing r takes y_r a_r out of sum(y alpha); S must make it back up.
        delta = float(y_ds[r] * a_r)
        if strategy == "avg":
            delta = _shift_balance(asm.alpha, asm.y, C, asm.free_S(), delta)
            delta = _shift_balance(asm.alpha, asm.y, C, S, delta)
        else:
            K_r = kernel.row(int(r))[trans.I_S]
            for k in np.lexsort((trans.I_S, -K_r)):
                if delta == 0:
                    break
                j = S[k]
                old = asm.alpha[j]
                new = old + asm.y[j] * delta
                if 0.0 <= new <= C:
                    asm.alpha[j] = new
                    delta = 0.0
                else:
                    asm.alpha[j] = min(max(new, 0.0), C)
                    delta -= asm.y[j] * (asm.alpha[j] - old)
    # Mass that S could not absorb is repaired over S, then S + T.
    return asm.finish(strategy, [S], t0)


def seed_avg(prev: SvmState, trans: FoldTransition, config: SeedConfig | None = None) -> SeedResult:
    return _redistribute_removed(prev, trans, "avg")


def seed_top(prev: SvmState, trans: FoldTransition, config: SeedConfig | None = None) -> SeedResult:
    return _redistribute_removed(prev, trans, "top")


def seed(strategy: str, prev: SvmState | None, trans: FoldTransition, C: float,
         config: SeedConfig | None = None, rng: np.random.Generator | None = None) -> SeedResult:
    """Dispatch by strategy name (one of :data:`STRATEGIES`)."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {', '.join(STRATEGIES)}")
    if strategy == "zero" or prev is None:
        t0 = time.perf_counter()
        result = seed_zero(trans, C)
        result.init_seconds = time.perf_counter() - t0
        return result
    if strategy == "sir":
        return seed_sir(prev, trans, config, rng)
    return {"ato": seed_ato, "mir": seed_mir, "avg": seed_avg, "top": seed_top}[strategy](prev, trans, config)
