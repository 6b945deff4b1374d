"""Shared fixtures-by-hand: random problem generators per sufficiency
condition, plus finite-difference oracles used against the analytic
derivatives."""

import numpy as np

from attnopt import Problem, posterior_variance

# The two priors for which no monotone policy exists (worked failure cases).
FAIL_K2 = {"sigma": [[10.0, -3.0], [-3.0, 1.0]], "alpha": [1.0, 4.0]}
FAIL_K3 = {
    "sigma": [[19.0, 3.0, 0.0], [3.0, 5.0, 3.0], [0.0, 3.0, 2.0]],
    "alpha": [1.0, 1.0, 20.0],
}
# Three-source prior with a dominant precision matrix (manipulation example).
DOM_K3 = {
    "sigma": [[3.0, -2.0, 0.0], [-2.0, 3.0, 0.0], [0.0, 0.0, 2.0]],
    "alpha": [1.0, 1.0, 1.0],
}


def random_alpha(rng, k):
    return rng.uniform(0.3, 3.0, size=k)


def substitutes_problem(rng, k):
    """Prior whose precision matrix has non-positive off-diagonals."""
    w = rng.uniform(0.0, 1.0, size=(k, k))
    w = np.triu(w, 1)
    w = w + w.T
    prec = -w
    np.fill_diagonal(prec, w.sum(axis=1) + rng.uniform(0.2, 2.0, size=k))
    sigma = np.linalg.inv(prec)
    return Problem(0.5 * (sigma + sigma.T), random_alpha(rng, k))


def complements_problem(rng, k):
    """Prior with non-positive covariances and non-negative state covs."""
    alpha = random_alpha(rng, k)
    for _ in range(200):
        sigma = np.diag(rng.uniform(1.0, 3.0, size=k))
        off = rng.uniform(0.0, 0.4 / k, size=(k, k))
        off = np.triu(off, 1)
        sigma = sigma - off - off.T
        if np.all(np.linalg.eigvalsh(sigma) > 1e-6) and np.all(sigma @ alpha >= 0):
            return Problem(sigma, alpha)
    raise RuntimeError("failed to sample a complements prior")


def dominance_problem(rng, k):
    """Prior whose precision matrix is strictly diagonally dominant."""
    w = rng.uniform(-1.0, 1.0, size=(k, k))
    w = np.triu(w, 1)
    prec = w + w.T
    np.fill_diagonal(prec, np.sum(np.abs(prec), axis=1) + rng.uniform(0.1, 1.5, size=k))
    sigma = np.linalg.inv(prec)
    return Problem(0.5 * (sigma + sigma.T), random_alpha(rng, k))


def k2_covsum_problem(rng):
    """Two-source prior satisfying the covariance-sum condition."""
    for _ in range(500):
        v = rng.uniform(0.5, 4.0, size=2)
        rho = rng.uniform(-0.95, 0.95)
        sigma = np.array(
            [[v[0], rho * np.sqrt(v[0] * v[1])], [rho * np.sqrt(v[0] * v[1]), v[1]]]
        )
        alpha = random_alpha(rng, 2)
        if np.sum(sigma @ alpha) >= 1e-9:
            return Problem(sigma, alpha)
    raise RuntimeError("failed to sample a two-source prior")


def random_passing_problem(rng, k):
    """A prior passing one of the general conditions, chosen at random."""
    gen = rng.choice([substitutes_problem, complements_problem, dominance_problem])
    return gen(rng, k)


def random_spd_problem(rng, k):
    """Unrestricted SPD prior (may fail every condition)."""
    a = rng.normal(size=(k, k))
    sigma = a @ a.T + 0.3 * k * np.eye(k)
    return Problem(0.5 * (sigma + sigma.T), random_alpha(rng, k))


def fd_gradient(p, q, h=1e-5):
    k = q.size
    out = np.empty(k)
    for i in range(k):
        e = np.zeros(k)
        e[i] = h
        out[i] = (posterior_variance(p, q + e) - posterior_variance(p, q - e)) / (2 * h)
    return out


def fd_hessian(p, q, h=1e-5):
    k = q.size
    out = np.empty((k, k))
    for i in range(k):
        for j in range(k):
            ei, ej = np.zeros(k), np.zeros(k)
            ei[i] = h
            ej[j] = h
            out[i, j] = (
                posterior_variance(p, q + ei + ej)
                - posterior_variance(p, q + ei - ej)
                - posterior_variance(p, q - ei + ej)
                + posterior_variance(p, q - ei - ej)
            ) / (4 * h * h)
    return out
