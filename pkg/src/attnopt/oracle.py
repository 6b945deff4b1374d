"""Brute-force oracle: minimize posterior variance over budgeted attention.

Independent of the stage solver by construction.  The primary method is
projected gradient descent on the (floored) budget simplex, finished by a
Newton polish on the identified free set; an exhaustive support
enumeration is available as a second, slower route for cross-checks.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import _kernels
from .core import AttentionVector, Problem, posterior_covariance, posterior_variance
from .errors import InfeasibleFloorError, NoConvergenceError

_PG_TOL = 1e-10
_KKT_TOL = 1e-8
_ACTIVE_EPS = 1e-11


@dataclass(frozen=True)
class OracleResult:
    q_star: AttentionVector
    value: float
    kkt_residual: float
    iterations: int


def _marginal_values(p: Problem, q: np.ndarray) -> np.ndarray:
    g, _ = _kernels.gamma_value(p.precision, q, p.alpha)
    return g * g


def kkt_residual(p: Problem, q: np.ndarray, floor: np.ndarray, budget: float) -> float:
    """Scaled stationarity defect: equal marginal values on the free set,
    no larger marginal value on the floored set, budget respected."""
    mv = _marginal_values(p, q)
    nu = float(np.max(mv))
    free = q > floor + _ACTIVE_EPS * (1.0 + budget)
    resid = float(nu - np.min(mv[free])) if free.any() else 0.0
    resid = max(resid, abs(float(np.sum(q)) - budget))
    return resid / (1.0 + nu)


def _newton_polish(p: Problem, budget: float, floor: np.ndarray, q: np.ndarray,
                   max_outer: int = 60) -> tuple[np.ndarray, int]:
    """Active-set Newton refinement of a near-optimal point.

    Solves the equal-marginal-value stationarity system on the current
    free set; coordinates that hit their floor are pinned, floored
    coordinates whose marginal value overtakes the common level are
    released.  Falls back silently on singular systems (caller re-checks
    the KKT residual)."""
    k = p.n_sources
    eps_act = _ACTIVE_EPS * (1.0 + budget)
    free = q > floor + eps_act
    if not free.any():
        return q, 0
    q = q.copy()
    iters = 0
    for _ in range(max_outer):
        iters += 1
        changed = False
        for _ in range(60):
            idx = np.nonzero(free)[0]
            cov = posterior_covariance(p, q)
            g = cov @ p.alpha
            mv = g * g
            nu = float(np.mean(mv[idx]))
            hess_ff = 2.0 * np.outer(g[idx], g[idx]) * cov[np.ix_(idx, idx)]
            n_f = idx.size
            jac = np.zeros((n_f + 1, n_f + 1))
            jac[:n_f, :n_f] = -hess_ff
            jac[:n_f, n_f] = -1.0
            jac[n_f, :n_f] = 1.0
            resid = np.empty(n_f + 1)
            resid[:n_f] = mv[idx] - nu
            resid[n_f] = float(np.sum(q)) - budget
            scale = 1.0 + abs(nu)
            if float(np.max(np.abs(resid))) <= 1e-14 * scale:
                break
            try:
                delta = np.linalg.solve(jac, -resid)
            except np.linalg.LinAlgError:
                return q, iters
            dq = delta[:n_f]
            # damp so no free coordinate crosses its floor
            t_step = 1.0
            hit = None
            for pos, i in enumerate(idx):
                if dq[pos] < 0.0:
                    allowed = (floor[i] - q[i]) / dq[pos]
                    if allowed < t_step:
                        t_step, hit = allowed, i
            q[idx] += t_step * dq
            if hit is not None:
                q[hit] = floor[hit]
                free[hit] = False
                changed = True
                if not free.any():
                    return q, iters
                break
        if changed:
            continue
        # release a floored coordinate whose marginal value overtakes nu
        mv = _marginal_values(p, q)
        nu = float(np.max(mv[free]))
        bound = ~free
        viol = (mv - nu) * bound
        j = int(np.argmax(viol))
        if bound[j] and viol[j] > 1e-11 * (1.0 + nu):
            free[j] = True
            continue
        break
    return q, iters


def _minimize(p: Problem, budget: float, floor: np.ndarray, q0: np.ndarray) -> tuple[np.ndarray, int]:
    q, it_pgd, _ = _kernels.pgd_minimize(
        p.precision, p.alpha, floor, budget, q0, 600, _PG_TOL
    )
    q, it_newton = _newton_polish(p, budget, floor, q)
    if kkt_residual(p, q, floor, budget) > _KKT_TOL:
        q, it2, _ = _kernels.pgd_minimize(
            p.precision, p.alpha, floor, budget, q, 40000, _PG_TOL
        )
        it_pgd += it2
        q, it3 = _newton_polish(p, budget, floor, q)
        it_newton += it3
        if kkt_residual(p, q, floor, budget) > _KKT_TOL:
            raise NoConvergenceError("oracle failed to certify a stationary point")
    return q, it_pgd + it_newton


def constrained_t_optimal(p: Problem, t: float, floor, *, q0=None) -> OracleResult:
    """argmin of the posterior variance over {q >= floor, sum q = t}.

    With a zero floor this is the plain budget-optimal attention vector.
    ``q0`` optionally overrides the uniform start (used by uniqueness
    probes; any infeasible start is projected first).
    """
    if t <= 0:
        raise ValueError("budget must be positive")
    floor = np.asarray(floor, dtype=np.float64).reshape(-1)
    if floor.shape != (p.n_sources,) or np.any(floor < 0):
        raise ValueError("floor must be a non-negative length-K vector")
    slack = t - float(np.sum(floor))
    if slack < -1e-12 * (1.0 + t):
        raise InfeasibleFloorError("floors exceed the attention budget")
    if q0 is None:
        q0 = floor + max(slack, 0.0) / p.n_sources
    q0 = np.asarray(q0, dtype=np.float64)
    q, iters = _minimize(p, t, floor, q0)
    q[q < floor + 1e-15 * (1.0 + t)] = floor[q < floor + 1e-15 * (1.0 + t)]
    return OracleResult(
        q_star=AttentionVector(q),
        value=posterior_variance(p, q),
        kkt_residual=kkt_residual(p, q, floor, t),
        iterations=iters,
    )


def t_optimal(p: Problem, t: float, *, q0=None) -> OracleResult:
    """Minimize posterior variance over the budget-t simplex (unique optimum)."""
    return constrained_t_optimal(p, t, np.zeros(p.n_sources), q0=q0)


def _equal_mv_on_support(p: Problem, support: tuple[int, ...], budget: float,
                         floor: np.ndarray) -> np.ndarray | None:
    """Solve the equal-marginal-value system with all off-support
    coordinates pinned at their floor; None when no interior solution."""
    k = p.n_sources
    q = floor.copy()
    slack = budget - float(np.sum(floor))
    idx = np.array(support)
    q[idx] += slack / idx.size
    for _ in range(200):
        cov = posterior_covariance(p, q)
        g = cov @ p.alpha
        mv = g * g
        nu = float(np.mean(mv[idx]))
        resid = np.empty(idx.size + 1)
        resid[:-1] = mv[idx] - nu
        resid[-1] = float(np.sum(q)) - budget
        if float(np.max(np.abs(resid))) <= 1e-13 * (1.0 + abs(nu)):
            return q
        hess_ff = 2.0 * np.outer(g[idx], g[idx]) * cov[np.ix_(idx, idx)]
        jac = np.zeros((idx.size + 1, idx.size + 1))
        jac[:-1, :-1] = -hess_ff
        jac[:-1, -1] = -1.0
        jac[-1, :-1] = 1.0
        try:
            delta = np.linalg.solve(jac, -resid)
        except np.linalg.LinAlgError:
            return None
        dq = delta[:-1]
        t_step = 1.0
        for pos, i in enumerate(idx):
            if dq[pos] < 0.0 and q[i] + dq[pos] < floor[i]:
                t_step = min(t_step, 0.9 * (floor[i] - q[i]) / dq[pos])
        q[idx] += t_step * dq
        if t_step < 1e-12:
            return None
    return None


def t_optimal_enumerated(p: Problem, t: float, floor=None) -> OracleResult:
    """Exhaustive second route: try every support subset and keep the best
    feasible equal-marginal-value candidate.  Exponential in K; intended
    for cross-checks with K <= 8."""
    if p.n_sources > 8:
        raise ValueError("support enumeration is limited to K <= 8")
    if floor is None:
        floor = np.zeros(p.n_sources)
    floor = np.asarray(floor, dtype=np.float64)
    if t - float(np.sum(floor)) < 0:
        raise InfeasibleFloorError("floors exceed the attention budget")
    best_q, best_v = None, np.inf
    for size in range(1, p.n_sources + 1):
        for support in combinations(range(p.n_sources), size):
            q = _equal_mv_on_support(p, support, t, floor)
            if q is None or np.any(q < floor - 1e-10 * (1.0 + t)):
                continue
            v = posterior_variance(p, np.maximum(q, floor))
            if v < best_v:
                best_q, best_v = np.maximum(q, floor), v
    if best_q is None:
        raise NoConvergenceError("no support admitted an interior solution")
    return OracleResult(
        q_star=AttentionVector(best_q),
        value=best_v,
        kkt_residual=kkt_residual(p, best_q, floor, t),
        iterations=0,
    )


@dataclass(frozen=True)
class MonotonicityReport:
    """Grid scan of the budget-optimal path for coordinate decreases.

    ``violations`` lists (source, t_prev, t_next) for every consecutive
    grid pair where that source's optimal attention drops by more than the
    tolerance; an empty list means a single monotone policy serves every
    budget on the grid."""

    t_grid: np.ndarray
    attention: np.ndarray
    violations: list[tuple[int, float, float]]

    def is_monotone(self) -> bool:
        return not self.violations


def monotonicity_scan(p: Problem, t_grid, *, tol: float = 1e-7) -> MonotonicityReport:
    ts = np.asarray(t_grid, dtype=np.float64)
    if ts.ndim != 1 or ts.size < 2 or np.any(np.diff(ts) <= 0) or ts[0] <= 0:
        raise ValueError("need an increasing grid of positive budgets")
    rows = []
    q_prev = None
    for t in ts:
        q0 = None if q_prev is None else q_prev + (t - np.sum(q_prev)) / p.n_sources
        rows.append(t_optimal(p, float(t), q0=q0).q_star.q)
        q_prev = rows[-1]
    attention = np.array(rows)
    violations = []
    for a in range(ts.size - 1):
        for i in range(p.n_sources):
            if attention[a + 1, i] < attention[a, i] - tol:
                violations.append((i, float(ts[a]), float(ts[a + 1])))
    return MonotonicityReport(t_grid=ts, attention=attention, violations=violations)
