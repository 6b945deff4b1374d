"""Choice between two goods with endogenous attention and stopping.

The two-source stage path pins down a deterministic posterior-variance
curve for the payoff difference; the belief about that difference is then
a time-changed Brownian motion, and the optimal stopping rule is a
symmetric boundary in belief space computed by backward induction on a
variance-matched trinomial lattice.  Choice accuracy conditional on
stopping at t is the normal cdf of boundary over posterior std.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from . import _kernels
from .assumptions import classify
from .core import Problem
from .errors import (
    AssumptionViolatedError,
    DomainError,
    GridTooCoarseError,
    InvalidConfigError,
)
from .stages import k2_closed_form


@dataclass(frozen=True)
class BinaryChoiceProblem:
    """Two-good choice: prior covariance over the (transformed) attributes,
    per-unit-time signal weights and a flow waiting cost.

    Sources are relabeled on construction so that the first attribute has
    the weakly larger prior covariance with the payoff difference; the
    ``relabeled`` flag records when that swap happened.
    """

    sigma: np.ndarray
    weights: tuple[float, float] = (1.0, 1.0)
    cost: float = 0.1
    relabeled: bool = field(init=False, default=False)

    def __post_init__(self):
        alpha = np.asarray(self.weights, dtype=np.float64)
        if alpha.shape != (2,) or np.any(alpha <= 0):
            raise ValueError("weights must be two positive numbers")
        if self.cost <= 0:
            raise ValueError("cost must be positive")
        prob = Problem(self.sigma, alpha)
        cov = prob.prior_state_cov
        swapped = cov[0] < cov[1]
        if swapped:
            perm = [1, 0]
            prob = Problem(prob.sigma[np.ix_(perm, perm)], alpha[perm])
        if classify(prob).k2_cov_sum is False:
            raise AssumptionViolatedError(
                "state/source covariances sum to a negative number; "
                "no deterministic attention path exists for this prior"
            )
        object.__setattr__(self, "sigma", prob.sigma)
        object.__setattr__(self, "weights", (float(prob.alpha[0]), float(prob.alpha[1])))
        object.__setattr__(self, "relabeled", bool(swapped))
        object.__setattr__(self, "_problem", prob)

    @property
    def problem(self) -> Problem:
        return self._problem  # type: ignore[attr-defined]

    @property
    def prior_state_variance(self) -> float:
        return self.problem.prior_state_variance


def switch_time(b: BinaryChoiceProblem) -> float:
    """Length of the exclusive first stage of attention."""
    s, (a1, a2) = b.sigma, b.weights
    det = float(s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0])
    t1 = (a1 * s[0, 0] + a2 * s[0, 1] - a1 * s[1, 0] - a2 * s[1, 1]) / (a2 * det)
    return max(t1, 0.0)


def posterior_variance_path(b: BinaryChoiceProblem, t) -> np.ndarray | float:
    """Posterior variance of the payoff difference at time t (closed form).

    Piecewise in t: hyperbolic decay while only the first source is
    sampled, then the constant-mixture branch.  Continuous at the switch
    and strictly decreasing.
    """
    s, (a1, a2) = b.sigma, b.weights
    det = float(s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0])
    t1 = switch_time(b)
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr < 0):
        raise DomainError("time must be non-negative")
    sig0 = a1 * a1 * s[0, 0] + a2 * a2 * s[1, 1] + 2 * a1 * a2 * s[0, 1]
    early = (sig0 + a2 * a2 * det * t_arr) / (1.0 + s[0, 0] * t_arr)
    late = (a1 + a2) ** 2 * det / (s[0, 0] + s[1, 1] - 2 * s[0, 1] + det * t_arr)
    out = np.where(t_arr <= t1, early, late)
    return float(out) if np.isscalar(t) else out


def hitting_time(b: BinaryChoiceProblem, v) -> tuple:
    """Time T(v) at which the posterior variance has fallen by v, and T'(v).

    Inverse of ``sigma0^2 - posterior_variance_path``; defined for
    0 <= v < sigma0^2.  Both branches agree in value and derivative at the
    switch point.
    """
    s, (a1, a2) = b.sigma, b.weights
    det = float(s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0])
    sig0 = b.prior_state_variance
    cov = b.problem.prior_state_cov
    v_arr = np.asarray(v, dtype=np.float64)
    if np.any(v_arr < 0) or np.any(v_arr >= sig0):
        raise DomainError("variance reduction must lie in [0, prior variance)")
    v_star = (cov[0] - cov[1]) * cov[0] / (s[0, 0] - s[0, 1])
    early_t = v_arr / (cov[0] ** 2 - s[0, 0] * v_arr)
    late_t = (a1 + a2) ** 2 / (sig0 - v_arr) - (s[0, 0] + s[1, 1] - 2 * s[0, 1]) / det
    early_d = 1.0 / (cov[0] - s[0, 0] * v_arr / cov[0]) ** 2
    late_d = (a1 + a2) ** 2 / (sig0 - v_arr) ** 2
    t_out = np.where(v_arr <= v_star, early_t, late_t)
    d_out = np.where(v_arr < v_star, early_d, late_d)
    if np.isscalar(v):
        return float(t_out), float(d_out)
    return t_out, d_out


@dataclass(frozen=True)
class StoppingGrid:
    """Lattice configuration for the stopping-boundary backward induction.

    The lattice is uniform in cumulated variance, so each step's up/down
    probability equals ``jump_prob`` exactly; time points follow from the
    hitting-time inverse.  Horizon ends where the posterior variance falls
    below ``variance_floor_frac`` of the prior (or at ``t_max``)."""

    y_cells: int = 600
    y_halfwidth_sigmas: float = 6.0
    jump_prob: float = 0.45
    variance_floor_frac: float = 1e-3
    t_max: float | None = None

    def __post_init__(self):
        if self.y_cells < 8:
            raise InvalidConfigError("need at least 8 belief cells per side")
        if not 0.0 < self.jump_prob <= 0.5:
            raise InvalidConfigError("jump probability must lie in (0, 1/2]")
        if not 0.0 < self.variance_floor_frac < 1.0:
            raise InvalidConfigError("variance floor fraction must lie in (0, 1)")
        if self.y_halfwidth_sigmas < 2.0:
            raise InvalidConfigError("belief range must cover at least 2 prior stds")

    def refined(self, factor: int = 2) -> "StoppingGrid":
        """Same physical ranges with `factor` times the belief resolution
        (step variance shrinks quadratically): the convergence-study knob."""
        return StoppingGrid(
            y_cells=self.y_cells * factor,
            y_halfwidth_sigmas=self.y_halfwidth_sigmas,
            jump_prob=self.jump_prob,
            variance_floor_frac=self.variance_floor_frac,
            t_max=self.t_max,
        )


@dataclass(frozen=True)
class StoppingSolution:
    """Boundary and accuracy curves on the solver's time grid."""

    time_grid: np.ndarray
    boundary: np.ndarray
    accuracy: np.ndarray
    state_variance: np.ndarray
    grid_meta: dict


def solve_stopping_boundary(
    b: BinaryChoiceProblem, grid: StoppingGrid | None = None
) -> StoppingSolution:
    """Backward induction for the symmetric stopping boundary k*(t).

    The belief about the payoff difference is a Brownian motion in
    cumulated-variance time; rewards are max(belief, 0) minus the flow
    cost of the elapsed real time.  The boundary is read off each backward
    step by interpolating the sign change of (continue - stop).
    """
    grid = grid or StoppingGrid()
    sig0 = b.prior_state_variance
    sd0 = math.sqrt(sig0)
    y_half = grid.y_halfwidth_sigmas * sd0
    dy = y_half / grid.y_cells
    y = np.linspace(-y_half, y_half, 2 * grid.y_cells + 1)
    if grid.t_max is not None:
        v_end = sig0 - float(posterior_variance_path(b, grid.t_max))
    else:
        v_end = sig0 * (1.0 - grid.variance_floor_frac)
    dv = 2.0 * grid.jump_prob * dy * dy
    n_steps = max(int(math.ceil(v_end / dv)), 8)
    vs = np.linspace(0.0, v_end, n_steps + 1)
    times, _ = hitting_time(b, vs)
    sigma2 = sig0 - vs
    boundary = _kernels.dp_sweep(y, times, sigma2, b.cost)
    # a boundary pinned into the last (edge-clamped) cell is not resolved
    if np.any(np.isnan(boundary)) or np.any(boundary >= y_half - dy - 1e-12):
        raise GridTooCoarseError(
            "stopping boundary exceeds the belief range; widen y_halfwidth_sigmas"
        )
    accuracy = ndtr(boundary / np.sqrt(sigma2))
    return StoppingSolution(
        time_grid=times,
        boundary=boundary,
        accuracy=accuracy,
        state_variance=sigma2,
        grid_meta={
            "steps": int(n_steps),
            "truncation_time": float(times[-1]),
            "dy": float(dy),
            "n_y": int(y.size),
            "jump_prob": float(grid.jump_prob),
        },
    )


def choice_accuracy(sol: StoppingSolution, t: float) -> float:
    """P(chosen good is the better one | stop at t), interpolated on the grid."""
    tg = sol.time_grid
    if t < tg[0] or t > tg[-1]:
        raise DomainError("time outside the solved grid")
    return float(np.interp(t, tg, sol.accuracy))
