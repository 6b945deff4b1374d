"""Posterior-covariance algebra for the multi-source Gaussian model.

A problem instance is a prior covariance over K attribute values plus a
strictly positive weight vector defining the scalar target state.  All
operations here are pure functions of (problem, cumulative attention
vector): posterior covariance, posterior variance of the state, the
state/attribute covariance vector and its first/second derivatives.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import _kernels
from .errors import NonPDError

# Relative asymmetry above which an input covariance is rejected rather
# than silently symmetrized.
_ASYM_REL_TOL = 1e-9


def _as_matrix(sigma) -> np.ndarray:
    m = np.array(sigma, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"covariance must be square, got shape {m.shape}")
    return m


def symmetrize(m: np.ndarray) -> np.ndarray:
    """(M + M')/2 after rejecting asymmetry beyond tolerance."""
    scale = float(np.max(np.abs(m))) or 1.0
    if np.max(np.abs(m - m.T)) > _ASYM_REL_TOL * scale:
        raise NonPDError("matrix is not symmetric within 1e-9 relative tolerance")
    return 0.5 * (m + m.T)


def spd_inverse(m: np.ndarray) -> np.ndarray:
    """Inverse of a symmetric positive-definite matrix, symmetrized."""
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NonPDError("matrix is not positive definite") from exc
    inv = np.linalg.inv(m)
    return 0.5 * (inv + inv.T)


@dataclass(frozen=True)
class Problem:
    """Prior covariance, target weights and (optional) prior means.

    ``sigma`` is a K x K symmetric positive-definite matrix over the
    attribute values, ``alpha`` a strictly positive length-K weight vector
    (the target state is ``alpha @ theta``), and ``mu`` the prior mean
    vector (defaults to zeros; it never affects attention decisions).
    """

    sigma: np.ndarray
    alpha: np.ndarray
    mu: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        sigma = symmetrize(_as_matrix(self.sigma))
        alpha = np.asarray(self.alpha, dtype=np.float64).reshape(-1)
        k = sigma.shape[0]
        if k < 2:
            raise ValueError("need at least two sources")
        if alpha.shape != (k,):
            raise ValueError(f"alpha must have length {k}, got {alpha.shape}")
        if not np.all(alpha > 0):
            raise ValueError("all weights must be strictly positive")
        mu = self.mu
        mu = np.zeros(k) if mu is None else np.asarray(mu, dtype=np.float64).reshape(-1)
        if mu.shape != (k,):
            raise ValueError(f"mu must have length {k}")
        try:
            np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError as exc:
            raise NonPDError("sigma is not positive definite") from exc
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "mu", mu)
        for arr in (sigma, alpha, mu):
            arr.setflags(write=False)

    @property
    def n_sources(self) -> int:
        return self.sigma.shape[0]

    @cached_property
    def precision(self) -> np.ndarray:
        """Prior precision matrix (inverse of sigma)."""
        prec = spd_inverse(self.sigma)
        prec.setflags(write=False)
        return prec

    @cached_property
    def prior_state_cov(self) -> np.ndarray:
        """Prior covariances between the state and each attribute: sigma @ alpha."""
        cov = self.sigma @ self.alpha
        cov.setflags(write=False)
        return cov

    @property
    def prior_state_variance(self) -> float:
        return float(self.alpha @ self.sigma @ self.alpha)


@dataclass(frozen=True)
class AttentionVector:
    """Cumulative attention per source; the budget is the coordinate sum."""

    q: np.ndarray
    budget: float = field(init=False)

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64).reshape(-1)
        if q.size == 0 or np.any(q < 0) or not np.all(np.isfinite(q)):
            raise ValueError("attention must be finite and non-negative")
        q = q.copy()
        q.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "budget", float(np.sum(q)))


def as_attention(q, k: int) -> np.ndarray:
    """Coerce an AttentionVector or array-like into a validated ndarray."""
    arr = q.q if isinstance(q, AttentionVector) else np.asarray(q, dtype=np.float64).reshape(-1)
    if arr.shape != (k,):
        raise ValueError(f"attention vector must have length {k}, got {arr.shape}")
    if np.any(arr < 0) or not np.all(np.isfinite(arr)):
        raise ValueError("attention must be finite and non-negative")
    return arr


@dataclass(frozen=True)
class PosteriorState:
    """Gaussian belief: covariance, mean, state variance and state/source covs."""

    cov: np.ndarray
    mean: np.ndarray
    state_variance: float
    gamma: np.ndarray

    @classmethod
    def create(cls, cov: np.ndarray, mean: np.ndarray, alpha: np.ndarray) -> "PosteriorState":
        cov = symmetrize(np.asarray(cov, dtype=np.float64))
        g = cov @ alpha
        return cls(cov=cov, mean=np.asarray(mean, dtype=np.float64),
                   state_variance=float(alpha @ g), gamma=g)


def _info_matrix(p: Problem, q: np.ndarray) -> np.ndarray:
    return p.precision + np.diag(q)


def posterior_covariance(p: Problem, q) -> np.ndarray:
    """(sigma^-1 + diag(q))^-1, the belief covariance after attention q."""
    q = as_attention(q, p.n_sources)
    try:
        cov = spd_inverse(_info_matrix(p, q))
    except NonPDError as exc:
        raise NonPDError("posterior information matrix not PD (invalid sigma?)") from exc
    return cov


def posterior_covariance_woodbury(p: Problem, q) -> np.ndarray:
    """Equivalent saturation form sigma - sigma (sigma + diag(1/q))^-1 sigma.

    Only valid for strictly positive q; used as an independent cross-check
    of :func:`posterior_covariance`, never on the main path.
    """
    q = as_attention(q, p.n_sources)
    if np.any(q <= 0):
        raise ValueError("saturation form requires strictly positive attention")
    inner = spd_inverse(p.sigma + np.diag(1.0 / q))
    cov = p.sigma - p.sigma @ inner @ p.sigma
    return 0.5 * (cov + cov.T)


def posterior_variance(p: Problem, q) -> float:
    """Posterior variance of the target state after attention q."""
    q = as_attention(q, p.n_sources)
    try:
        _, val = _kernels.gamma_value(p.precision, q, p.alpha)
    except np.linalg.LinAlgError as exc:
        raise NonPDError("posterior information matrix not PD (invalid sigma?)") from exc
    return val


def gamma(p: Problem, q) -> np.ndarray:
    """Posterior covariance between the state and each attribute.

    At q = 0 this is sigma @ alpha, the vector of prior state/attribute
    covariances; the squared coordinates are the marginal rates of
    posterior-variance reduction per unit of attention.
    """
    q = as_attention(q, p.n_sources)
    try:
        g, _ = _kernels.gamma_value(p.precision, q, p.alpha)
    except np.linalg.LinAlgError as exc:
        raise NonPDError("posterior information matrix not PD (invalid sigma?)") from exc
    return g


def grad_hessian(p: Problem, q) -> tuple[np.ndarray, np.ndarray]:
    """Gradient and Hessian of the posterior variance in q.

    grad_i = -g_i^2 and hess = 2 diag(g) C diag(g) with C the posterior
    covariance; the Hessian is positive semi-definite, so the posterior
    variance is convex on the non-negative orthant.
    """
    q = as_attention(q, p.n_sources)
    cov = posterior_covariance(p, q)
    g = cov @ p.alpha
    grad = -(g * g)
    hess = 2.0 * np.outer(g, g) * cov
    return grad, hess
