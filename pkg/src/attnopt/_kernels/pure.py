"""NumPy implementations of the numerical hot kernels.

The compiled extension (``attnopt._kernels._speedups``) mirrors these
signatures exactly; this module is the fallback selected at import when
the extension is unavailable.  Keep the two in behavioural lockstep: the
test suite runs both backends against each other.
"""

import numpy as np

__all__ = ["gamma_value", "project_budget", "pgd_minimize", "dp_sweep"]


def gamma_value(prec, q, alpha):
    """Solve (prec + diag(q)) g = alpha.

    Returns (g, alpha @ g), i.e. the posterior covariance between the
    target state and each attribute, and the posterior variance of the
    state.  ``prec`` must be symmetric positive-definite and ``q >= 0``.
    """
    m = prec + np.diag(q)
    np.linalg.cholesky(m)  # PD check; raises LinAlgError otherwise
    g = np.linalg.solve(m, alpha)
    return g, float(alpha @ g)


def project_budget(v, floor, budget):
    """Euclidean projection of v onto {q : q >= floor, sum(q) = budget}.

    Shifts to r = q - floor and projects onto the scaled simplex with the
    usual sort-and-threshold rule.
    """
    r = np.asarray(v, dtype=np.float64) - floor
    s = budget - float(np.sum(floor))
    if s <= 0.0:
        return floor.copy()
    u = np.sort(r)[::-1]
    css = np.cumsum(u) - s
    ks = np.arange(1, r.size + 1)
    rho = np.nonzero(u * ks > css)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(r - theta, 0.0) + floor


def pgd_minimize(prec, alpha, floor, budget, q0, max_iter, pg_tol):
    """Projected gradient descent for min V(q) on {q >= floor, sum q = budget}.

    V(q) = alpha' (prec + diag q)^-1 alpha, gradient -g_i^2 with g from
    gamma_value.  Backtracking line search along the projected arc;
    terminates when the unit-step projected gradient norm falls below
    ``pg_tol``.  Returns (q, iterations, projected_gradient_norm).
    """
    q = project_budget(np.asarray(q0, dtype=np.float64), floor, budget)
    g, val = gamma_value(prec, q, alpha)
    step = 1.0
    pgn = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        grad = -(g * g)
        pg = q - project_budget(q - grad, floor, budget)
        pgn = float(np.sqrt(pg @ pg))
        if pgn <= pg_tol:
            break
        accepted = False
        while step >= 1e-18:
            q_new = project_budget(q - step * grad, floor, budget)
            d = q_new - q
            if float(d @ d) == 0.0:
                break
            g_new, val_new = gamma_value(prec, q_new, alpha)
            if val_new <= val + 1e-4 * float(grad @ d):
                q, g, val = q_new, g_new, val_new
                step = min(step * 1.3, 1e8)
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
    return q, it, pgn


def dp_sweep(y, times, sigma2, cost):
    """Backward induction for the symmetric optimal-stopping boundary.

    ``y`` is a uniform belief grid, ``times`` the (increasing) decision
    times, ``sigma2`` the posterior state variance at those times and
    ``cost`` the flow cost of waiting.  The belief diffuses with per-step
    variance sigma2[k] - sigma2[k+1] (trinomial transition matched to that
    increment); the terminal value is the stop value at times[-1].

    Returns the stopping boundary per time point (NaN where the boundary
    is not bracketed by the grid).
    """
    y = np.asarray(y, dtype=np.float64)
    n = times.size
    dy = y[1] - y[0]
    gain = np.maximum(y, 0.0)
    i_zero = int(np.searchsorted(y, 0.0))
    w = gain - cost * times[-1]
    boundary = np.empty(n)
    boundary[-1] = 0.0
    for k in range(n - 2, -1, -1):
        p = (sigma2[k] - sigma2[k + 1]) / (2.0 * dy * dy)
        stop = gain - cost * times[k]
        cont = stop.copy()
        cont[1:-1] = w[1:-1] + p * (w[2:] - 2.0 * w[1:-1] + w[:-2])
        diff = cont[i_zero:] - stop[i_zero:]
        if diff[0] <= 0.0:
            boundary[k] = 0.0
        else:
            below = diff <= 0.0
            if not below.any():
                boundary[k] = np.nan
            else:
                j = int(np.argmax(below))
                boundary[k] = y[i_zero + j - 1] + dy * diff[j - 1] / (diff[j - 1] - diff[j])
        w = np.maximum(stop, cont)
    return boundary
