"""Dynamic consequences of forcing early attention onto one source.

The agent is made to watch source 1 exclusively for T units of time and
is free afterwards.  Because every sufficiency condition survives
conditioning, the continuation policy is just the stage path of the
posterior problem, so the manipulated trajectory is exact and cheap; the
constrained oracle provides the independent cross-check.  The headline
quantities are the catch-up time (when the unmanipulated path would have
accumulated T on source 1 anyway) and the per-source cumulative
differences against the baseline.
"""

from dataclasses import dataclass

import numpy as np

from .core import Problem, posterior_covariance
from .stages import StagePath, cumulative_first_reaches, n_of_t, solve_stages


@dataclass(frozen=True)
class ManipulationReport:
    """Forced duration, catch-up time and cumulative-difference curves.

    ``diffs[a, i]`` is manipulated-minus-baseline cumulative attention to
    source i at ``t_grid[a]``; rows sum to zero (both paths spend t)."""

    T: float
    T_star: float
    t_grid: np.ndarray
    diffs: np.ndarray


def _post_manipulation_path(p: Problem, T: float) -> StagePath:
    """Optimal stage path of the posterior problem after T units on source 1."""
    forced = np.zeros(p.n_sources)
    forced[0] = T
    posterior = Problem(posterior_covariance(p, forced), p.alpha)
    return solve_stages(posterior)


def manipulated_path(p: Problem, T: float, t: float) -> np.ndarray:
    """Cumulative attention at time t under the forced-start strategy.

    Equals (t, 0, ..., 0) during the manipulation and afterwards the
    forced amount plus the posterior problem's optimal path; this
    coincides with the floor-constrained variance minimizer at budget t.
    """
    if T <= 0:
        raise ValueError("manipulation duration must be positive")
    if t < 0:
        raise ValueError("time must be non-negative")
    out = np.zeros(p.n_sources)
    if t <= T:
        out[0] = t
        return out
    out[0] = T
    return out + n_of_t(_post_manipulation_path(p, T), t - T)


def catch_up_time(p: Problem, T: float) -> float:
    """Earliest time the baseline path gives source 1 a cumulative T.

    From this time on the manipulated and baseline paths coincide.  The
    baseline path is piecewise linear, so the inverse is exact."""
    if T < 0:
        raise ValueError("manipulation duration must be non-negative")
    if T == 0:
        return 0.0
    return cumulative_first_reaches(solve_stages(p), 0, T)


def compare_cumulative(p: Problem, T: float, t_grid) -> ManipulationReport:
    """Manipulated-minus-baseline cumulative attention over a time grid.

    Source 1's difference is positive up to the catch-up time and zero
    after; when every source pair is substitutable the other sources'
    differences are non-positive throughout (with complementarities they
    can flip sign, which the report deliberately leaves visible)."""
    ts = np.asarray(t_grid, dtype=np.float64)
    if ts.ndim != 1 or ts.size == 0 or np.any(ts < 0) or np.any(np.diff(ts) <= 0):
        raise ValueError("need an increasing grid of non-negative times")
    baseline = solve_stages(p)  # also gates unsupported priors
    if T == 0:
        diffs = np.zeros((ts.size, p.n_sources))
        return ManipulationReport(T=0.0, T_star=0.0, t_grid=ts, diffs=diffs)
    post = _post_manipulation_path(p, T)
    t_star = cumulative_first_reaches(baseline, 0, T)
    forced = np.zeros(p.n_sources)
    forced[0] = T
    rows = []
    for t in ts:
        t = float(t)
        if t <= T:
            manip = np.zeros(p.n_sources)
            manip[0] = t
        else:
            manip = forced + n_of_t(post, t - T)
        rows.append(manip - n_of_t(baseline, t))
    return ManipulationReport(T=float(T), T_star=float(t_star), t_grid=ts,
                              diffs=np.array(rows))


__all__ = [
    "ManipulationReport",
    "manipulated_path",
    "catch_up_time",
    "compare_cumulative",
]
