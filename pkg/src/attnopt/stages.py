"""Deterministic stage-path solver for the optimal attention strategy.

Under any passing sufficiency condition the optimal policy is a sequence
of at most K stages with nested supports: within each stage attention is
split in a constant mixture over the current support, and a new source
joins exactly when its marginal value catches up with the common marginal
value of the sampled set.  The solver reproduces that structure directly:
argmax of |gamma| picks each support, a linear solve gives the mixture,
and a bracketed root search finds each switch time.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .assumptions import classify
from .core import Problem
from .errors import (
    AssumptionViolatedError,
    NoConvergenceError,
    NonPDError,
    UnsupportedPriorError,
    WrongDimensionError,
)

# Relative tie tolerance for argmax-set formation: symmetric priors
# produce exact ties that strict comparison would drop.
TIE_REL_TOL = 1e-9
# Relative width at which switch-time bisection stops.
TIME_REL_TOL = 1e-12


@dataclass(frozen=True)
class Stage:
    """One constant-mixture segment of the policy.

    ``support`` holds 0-based source indices; ``mixture`` is a full-length
    simplex vector that is zero off the support. ``t_end`` is math.inf for
    the final stage.
    """

    t_start: float
    t_end: float
    support: tuple[int, ...]
    mixture: np.ndarray

    def __post_init__(self):
        mix = np.asarray(self.mixture, dtype=np.float64).copy()
        if abs(float(mix.sum()) - 1.0) > 1e-12:
            raise ValueError("stage mixture must sum to one")
        off = np.ones(mix.size, dtype=bool)
        off[list(self.support)] = False
        if np.any(mix[off] != 0.0):
            raise ValueError("stage mixture must vanish off the support")
        if np.any(mix < 0.0):
            raise ValueError("stage mixture must be non-negative")
        if not self.t_start < self.t_end:
            raise ValueError("stage must have positive length")
        mix.setflags(write=False)
        object.__setattr__(self, "t_start", float(self.t_start))
        object.__setattr__(self, "t_end", float(self.t_end))
        object.__setattr__(self, "mixture", mix)
        object.__setattr__(self, "support", tuple(int(i) for i in sorted(self.support)))


@dataclass(frozen=True)
class StagePath:
    """Full solved policy: ordered stages with strictly nested supports."""

    stages: tuple[Stage, ...]
    problem: Problem

    def __post_init__(self):
        stages = tuple(self.stages)
        k = self.problem.n_sources
        if not stages or len(stages) > k:
            raise ValueError("need between 1 and K stages")
        if stages[0].t_start != 0.0 or not math.isinf(stages[-1].t_end):
            raise ValueError("stages must start at 0 and end at +inf")
        prev: frozenset[int] = frozenset()
        t_prev = 0.0
        for s in stages:
            if s.t_start != t_prev:
                raise ValueError("stages must be contiguous")
            cur = frozenset(s.support)
            if not prev < cur:
                raise ValueError("supports must strictly nest")
            prev, t_prev = cur, s.t_end
        if prev != frozenset(range(k)):
            raise ValueError("final support must contain every source")
        alpha = self.problem.alpha
        if np.max(np.abs(stages[-1].mixture - alpha / alpha.sum())) > 1e-9:
            raise ValueError("final mixture must be proportional to the weights")
        object.__setattr__(self, "stages", stages)

    @property
    def switch_times(self) -> list[float]:
        return [s.t_end for s in self.stages[:-1]]


def transformed_weights(p: Problem, support) -> np.ndarray:
    """Weights of the component of the state learnable from ``support``.

    With the support ordered first, these are
    inv(sigma_TL) @ (sigma_TL, sigma_TR) @ alpha; for the full support
    this is just alpha.  Non-negative whenever a sufficiency condition
    holds (strictly positive under strict diagonal dominance).
    """
    support = sorted(set(int(i) for i in support))
    k = p.n_sources
    if not support or support[-1] >= k or support[0] < 0:
        raise ValueError("support must be a non-empty subset of the sources")
    if len(support) == k:
        return p.alpha.copy()
    rest = [i for i in range(k) if i not in support]
    s_tl = p.sigma[np.ix_(support, support)]
    s_tr = p.sigma[np.ix_(support, rest)]
    try:
        np.linalg.cholesky(s_tl)
    except np.linalg.LinAlgError as exc:  # principal submatrix of SPD: impossible
        raise NonPDError("principal submatrix not PD; invalid problem state") from exc
    return p.alpha[support] + np.linalg.solve(s_tl, s_tr @ p.alpha[rest])


def _mixture_for(p: Problem, support: list[int]) -> np.ndarray:
    w = transformed_weights(p, support)
    scale = max(float(np.max(w)), 1.0)
    if np.any(w < -1e-9 * scale):
        raise NoConvergenceError(
            "negative transformed weight; prior slipped past the assumption gate"
        )
    w = np.clip(w, 0.0, None)
    beta = np.zeros(p.n_sources)
    beta[support] = w / w.sum()
    return beta


def _argmax_set(g: np.ndarray, sampled: np.ndarray) -> list[int]:
    mag = np.abs(g)
    g_max = float(np.max(mag))
    members = mag >= g_max - TIE_REL_TOL * g_max
    return sorted(np.nonzero(members | sampled)[0].tolist())


def _catchup_gap(p: Problem, q_of, outside: list[int], t: float) -> float:
    """max_{j outside} |gamma_j| - common in-support gamma, at time t."""
    g, _ = _kernels.gamma_value(p.precision, q_of(t), p.alpha)
    inside = float(np.max(np.delete(g, outside))) if outside else float(np.max(g))
    return float(np.max(np.abs(g[outside]))) - inside


def _next_switch_time(p: Problem, q0: np.ndarray, t0: float, beta: np.ndarray,
                      outside: list[int]) -> float:
    """First time after t0 at which an outside source's |gamma| re-attains
    the common in-support value, along q(t) = q0 + (t - t0) beta.

    Brackets the first sign change of the gap by doubling steps, rescans
    the bracket on a fine grid so an early narrow crossing is not skipped,
    then bisects to relative width TIME_REL_TOL.
    """

    def q_of(t: float) -> np.ndarray:
        return q0 + (t - t0) * beta

    def gap(t: float) -> float:
        return _catchup_gap(p, q_of, outside, t)

    step = 1e-6 * (1.0 + t0)
    lo, hi = t0, t0 + step
    g_hi = gap(hi)
    while g_hi < 0.0:
        step *= 2.0
        lo, hi = hi, hi + step
        if hi > 1e13 * (1.0 + t0):
            raise NoConvergenceError("switch-time bracketing exhausted")
        g_hi = gap(hi)
    # guard against overshooting a narrow first crossing inside (lo, hi)
    for t in np.linspace(lo, hi, 65)[1:]:
        if gap(t) >= 0.0:
            hi = t
            break
        lo = t
    while hi - lo > TIME_REL_TOL * (1.0 + hi):
        mid = 0.5 * (lo + hi)
        if gap(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def solve_stages(p: Problem) -> StagePath:
    """Compute the full stage path for a prior passing the assumption gate.

    Stage k attends to the sources whose |gamma| is maximal at the current
    cumulative attention (ties within TIE_REL_TOL join; previously sampled
    sources never leave), in a constant mixture proportional to the
    transformed weights; the stage ends when an outside source catches up.
    A source that enters with zero transformed weight and no past
    attention receives zero attention but stays tracked in the support.
    """
    if not classify(p).passes():
        raise UnsupportedPriorError(
            "no sufficiency condition holds for this prior; "
            "use the variance oracle to analyse it instead"
        )
    k = p.n_sources
    q = np.zeros(k)
    sampled = np.zeros(k, dtype=bool)
    t = 0.0
    stages: list[Stage] = []
    for _ in range(k):
        g, _ = _kernels.gamma_value(p.precision, q, p.alpha)
        support = _argmax_set(g, sampled)
        if len(support) == k:
            beta = p.alpha / p.alpha.sum()
            stages.append(Stage(t, math.inf, tuple(range(k)), beta))
            break
        beta = _mixture_for(p, support)
        outside = [j for j in range(k) if j not in support]
        t_next = _next_switch_time(p, q, t, beta, outside)
        stages.append(Stage(t, t_next, tuple(support), beta))
        q = q + (t_next - t) * beta
        sampled |= beta > 0.0
        t = t_next
    return StagePath(tuple(stages), p)


def k2_closed_form(p: Problem) -> StagePath:
    """Two-source closed form: a single switch at (cov_i - cov_j) / (alpha_j det sigma).

    Stage 1 gives all attention to the source with the larger prior
    state/source covariance; stage 2 mixes in proportion to the weights.
    A zero switch time collapses to a single stage.
    """
    if p.n_sources != 2:
        raise WrongDimensionError("closed form requires exactly two sources")
    cov = p.prior_state_cov
    if float(cov.sum()) < -1e-12 * (1.0 + float(np.max(np.diag(p.sigma)))):
        raise AssumptionViolatedError("state/source covariances sum to a negative number")
    i = int(np.argmax(cov))
    j = 1 - i
    det = float(p.sigma[0, 0] * p.sigma[1, 1] - p.sigma[0, 1] * p.sigma[1, 0])
    t_star = float(cov[i] - cov[j]) / (p.alpha[j] * det)
    mix = p.alpha / p.alpha.sum()
    if t_star <= 0.0:
        return StagePath((Stage(0.0, math.inf, (0, 1), mix),), p)
    first = np.zeros(2)
    first[i] = 1.0
    return StagePath(
        (Stage(0.0, t_star, (i,), first), Stage(t_star, math.inf, (0, 1), mix)), p
    )


def n_of_t(path: StagePath, t: float) -> np.ndarray:
    """Cumulative attention at time t: piecewise-linear integral of the mixtures."""
    if t < 0:
        raise ValueError("time must be non-negative")
    q = np.zeros(path.problem.n_sources)
    for s in path.stages:
        if t <= s.t_start:
            break
        q += (min(t, s.t_end) - s.t_start) * s.mixture
    return q


def beta_of_t(path: StagePath, t: float) -> np.ndarray:
    """Instantaneous mixture at time t (right-continuous at switch times)."""
    if t < 0:
        raise ValueError("time must be non-negative")
    for s in path.stages:
        if s.t_start <= t < s.t_end:
            return s.mixture.copy()
    return path.stages[-1].mixture.copy()


def sample_path(path: StagePath, ts) -> np.ndarray:
    """n(t) stacked over an array of times; rows follow ``ts``."""
    return np.array([n_of_t(path, float(t)) for t in np.asarray(ts, dtype=np.float64)])


def discretize_policy(path: StagePath, horizon: int) -> np.ndarray:
    """Per-period precision table for the unit-budget discrete analogue.

    Row t holds n(t+1) - n(t): the integral of the mixture over period t.
    Every row sums to one.
    """
    if horizon < 1:
        raise ValueError("horizon must be a positive integer")
    grid = sample_path(path, np.arange(horizon + 1, dtype=np.float64))
    return np.diff(grid, axis=0)


def cumulative_first_reaches(path: StagePath, source: int, amount: float) -> float:
    """Earliest t with n_source(t) >= amount (exact on the piecewise-linear path)."""
    if amount <= 0.0:
        return 0.0
    acc = 0.0
    for s in path.stages:
        rate = float(s.mixture[source])
        if rate > 0.0:
            seg = (s.t_end - s.t_start) if math.isfinite(s.t_end) else math.inf
            need = (amount - acc) / rate
            if need <= seg:
                return s.t_start + need
            acc += rate * seg
    raise NoConvergenceError("cumulative attention never reaches the requested amount")


__all__ = [
    "Stage",
    "StagePath",
    "solve_stages",
    "k2_closed_form",
    "transformed_weights",
    "n_of_t",
    "beta_of_t",
    "sample_path",
    "discretize_policy",
    "cumulative_first_reaches",
]
