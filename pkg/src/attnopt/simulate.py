"""Monte Carlo replay of the observation model against the analytic curves.

Attention within a step aggregates into one Gaussian observation per
source with precision equal to the attention spent, which is exact for
this model: no discretization bias, only Monte Carlo noise.  Posterior
covariances are signal-independent, so the simulation's job is to confirm
that posterior means are a martingale whose across-path variance matches
the analytic variance reduction.

Paths use counter-based RNG streams keyed by (seed, path index): results
are bit-reproducible and unchanged when the path count grows.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .core import Problem
from .errors import InvalidConfigError
from .stages import StagePath, discretize_policy, sample_path

_MAX_DENSE_CHECKPOINTS = 257


class SimMode(str, enum.Enum):
    CONTINUOUS_EULER = "continuous_euler"
    DISCRETE_PRECISION = "discrete_precision"


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    horizon: float = 2.0
    n_paths: int = 1000
    seed: int = 0
    mode: SimMode = SimMode.CONTINUOUS_EULER

    def __post_init__(self):
        object.__setattr__(self, "mode", SimMode(self.mode))
        if self.dt <= 0 or self.horizon <= 0:
            raise InvalidConfigError("dt and horizon must be positive")
        if self.n_paths < 1:
            raise InvalidConfigError("need at least one path")
        if self.mode is SimMode.DISCRETE_PRECISION and self.horizon != int(self.horizon):
            raise InvalidConfigError("discrete mode needs an integer horizon")


@dataclass(frozen=True)
class SimResult:
    """Per-path posterior means of the state at the checkpoint times, the
    across-path variance of those means, and the analytic counterpart
    (prior variance minus posterior variance along the policy).

    The per-path posterior covariance is omitted deliberately: it is
    signal-independent and equals ``posterior_covariance(problem,
    attention[c])`` at every checkpoint, exactly.
    """

    times: np.ndarray
    attention: np.ndarray
    mean_trajectories: np.ndarray
    empirical_variance: np.ndarray
    analytic_variance: np.ndarray
    prior_state_mean: float
    seed: int
    mode: SimMode


def _path_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), index]))


def posterior_update_discrete(state, precisions, observations):
    """One conjugate update: add diag(precisions) in information form.

    Zero-precision coordinates leave the belief untouched (their
    observation values are ignored).  Returns a new PosteriorState."""
    from .core import PosteriorState, spd_inverse, symmetrize

    pi = np.asarray(precisions, dtype=np.float64).reshape(-1)
    x = np.asarray(observations, dtype=np.float64).reshape(-1)
    if np.any(pi < 0):
        raise ValueError("precisions must be non-negative")
    info = spd_inverse(symmetrize(state.cov))
    new_info = info + np.diag(pi)
    h = info @ state.mean + np.where(pi > 0, pi * x, 0.0)
    new_cov = spd_inverse(new_info)
    alpha_dir = state.gamma  # cov @ alpha; recover alpha via info
    alpha = info @ alpha_dir
    return PosteriorState.create(new_cov, new_cov @ h, alpha)


def _checkpoint_indices(n_steps: int) -> np.ndarray:
    if n_steps + 1 <= _MAX_DENSE_CHECKPOINTS:
        return np.arange(n_steps + 1)
    return np.unique(np.linspace(0, n_steps, _MAX_DENSE_CHECKPOINTS).round().astype(int))


def simulate(p: Problem, path: StagePath, cfg: SimConfig) -> SimResult:
    """Run the Monte Carlo replay of a policy.

    Per path: draw the attribute vector from the prior, then feed the
    policy's per-step attention as Gaussian observations and track the
    posterior mean of the state in information form.  Deterministic given
    the seed.
    """
    if path.problem is not p:
        # allow equal problems passed as distinct objects
        if not (
            np.array_equal(path.problem.sigma, p.sigma)
            and np.array_equal(path.problem.alpha, p.alpha)
        ):
            raise InvalidConfigError("policy was solved for a different problem")
    k = p.n_sources
    if cfg.mode is SimMode.DISCRETE_PRECISION:
        table = discretize_policy(path, int(cfg.horizon))
        step_times = np.arange(int(cfg.horizon) + 1, dtype=np.float64)
    else:
        n_steps = max(1, int(round(cfg.horizon / cfg.dt)))
        step_times = np.linspace(0.0, cfg.horizon, n_steps + 1)
        cum = sample_path(path, step_times)
        table = np.diff(cum, axis=0)
    n_steps = table.shape[0]
    ck = _checkpoint_indices(n_steps)
    times = step_times[ck]
    attention = sample_path(path, times)

    # deterministic per-checkpoint quantities
    prior_info = p.precision
    h0 = prior_info @ p.mu
    gammas = np.empty((ck.size, k))
    for c, q in enumerate(attention):
        gammas[c] = np.linalg.solve(prior_info + np.diag(q), p.alpha)

    chol = np.linalg.cholesky(p.sigma)
    sqrt_table = np.sqrt(table)
    means = np.empty((cfg.n_paths, ck.size))
    for i in range(cfg.n_paths):
        rng = _path_stream(cfg.seed, i)
        theta = p.mu + chol @ rng.standard_normal(k)
        noise = rng.standard_normal((n_steps, k))
        increments = table * theta + sqrt_table * noise
        h_cum = np.vstack([h0, h0 + np.cumsum(increments, axis=0)])[ck]
        means[i] = np.einsum("ck,ck->c", gammas, h_cum)

    emp_var = means.var(axis=0, ddof=1) if cfg.n_paths > 1 else np.zeros(ck.size)
    sigma0 = p.prior_state_variance
    analytic = np.array(
        [sigma0 - float(p.alpha @ g) for g in gammas]
    )
    return SimResult(
        times=times,
        attention=attention,
        mean_trajectories=means,
        empirical_variance=emp_var,
        analytic_variance=analytic,
        prior_state_mean=float(p.alpha @ p.mu),
        seed=cfg.seed,
        mode=cfg.mode,
    )
