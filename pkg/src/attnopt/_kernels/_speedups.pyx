# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twins of attnopt._kernels.pure.

Same signatures and semantics as the pure module; the test suite holds
the two implementations together.  Dense small-K linear algebra is done
with hand-rolled Cholesky factorizations to keep the projected-gradient
loop free of Python overhead.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport NAN, sqrt
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy

cnp.import_array()

__all__ = ["gamma_value", "project_budget", "pgd_minimize", "dp_sweep"]


cdef int _chol(double* m, int k) nogil:
    """In-place lower Cholesky of a row-major k x k matrix; -1 if not PD."""
    cdef int i, j, p
    cdef double acc
    for j in range(k):
        acc = m[j * k + j]
        for p in range(j):
            acc -= m[j * k + p] * m[j * k + p]
        if acc <= 0.0:
            return -1
        m[j * k + j] = sqrt(acc)
        for i in range(j + 1, k):
            acc = m[i * k + j]
            for p in range(j):
                acc -= m[i * k + p] * m[j * k + p]
            m[i * k + j] = acc / m[j * k + j]
    return 0


cdef void _chol_solve(double* l, double* x, int k) nogil:
    """Solve L L' x = b with b supplied in x (L lower triangular)."""
    cdef int i, j
    cdef double acc
    for i in range(k):
        acc = x[i]
        for j in range(i):
            acc -= l[i * k + j] * x[j]
        x[i] = acc / l[i * k + i]
    for i in range(k - 1, -1, -1):
        acc = x[i]
        for j in range(i + 1, k):
            acc -= l[j * k + i] * x[j]
        x[i] = acc / l[i * k + i]


cdef int _gamma_into(const double* prec, const double* q, const double* alpha,
                     double* work, double* g, double* val, int k) nogil:
    """g = (prec + diag q)^-1 alpha, val = alpha . g; -1 when not PD."""
    cdef int i
    memcpy(work, prec, k * k * sizeof(double))
    for i in range(k):
        work[i * k + i] += q[i]
    if _chol(work, k) != 0:
        return -1
    memcpy(g, alpha, k * sizeof(double))
    _chol_solve(work, g, k)
    cdef double acc = 0.0
    for i in range(k):
        acc += alpha[i] * g[i]
    val[0] = acc
    return 0


cdef void _project(const double* v, const double* floor, double budget,
                   double* out, double* scratch, int k) nogil:
    """Euclidean projection onto {q >= floor, sum q = budget} (sort rule)."""
    cdef int i, j
    cdef double s = budget, css, theta, key
    for i in range(k):
        s -= floor[i]
    if s <= 0.0:
        for i in range(k):
            out[i] = floor[i]
        return
    for i in range(k):
        scratch[i] = v[i] - floor[i]
    # insertion sort, descending (k is small)
    for i in range(1, k):
        key = scratch[i]
        j = i - 1
        while j >= 0 and scratch[j] < key:
            scratch[j + 1] = scratch[j]
            j -= 1
        scratch[j + 1] = key
    css = 0.0
    theta = 0.0
    for j in range(k):
        css += scratch[j]
        if scratch[j] * (j + 1) > css - s:
            theta = (css - s) / (j + 1)
    for i in range(k):
        out[i] = v[i] - floor[i] - theta
        if out[i] < 0.0:
            out[i] = 0.0
        out[i] += floor[i]


def gamma_value(const double[:, ::1] prec not None, const double[::1] q not None,
                const double[::1] alpha not None):
    """Solve (prec + diag(q)) g = alpha; returns (g, alpha @ g)."""
    cdef int k = prec.shape[0]
    cdef cnp.ndarray[double, ndim=1] g = np.empty(k)
    cdef double* work = <double*> malloc(k * k * sizeof(double))
    cdef double val = 0.0
    cdef int status
    if work == NULL:
        raise MemoryError
    try:
        status = _gamma_into(&prec[0, 0], &q[0], &alpha[0], work,
                             <double*> g.data, &val, k)
    finally:
        free(work)
    if status != 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return g, val


def project_budget(const double[::1] v not None, const double[::1] floor not None, double budget):
    """Euclidean projection of v onto {q : q >= floor, sum(q) = budget}."""
    cdef int k = v.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(k)
    cdef double* scratch = <double*> malloc(k * sizeof(double))
    if scratch == NULL:
        raise MemoryError
    try:
        _project(&v[0], &floor[0], budget, <double*> out.data, scratch, k)
    finally:
        free(scratch)
    return out


def pgd_minimize(const double[:, ::1] prec not None, const double[::1] alpha not None,
                 const double[::1] floor not None, double budget,
                 const double[::1] q0 not None, int max_iter, double pg_tol):
    """Projected gradient descent with Armijo backtracking; see pure twin."""
    cdef int k = prec.shape[0]
    cdef cnp.ndarray[double, ndim=1] q_out = np.empty(k)
    cdef double* buf = <double*> malloc((k * k + 7 * k) * sizeof(double))
    if buf == NULL:
        raise MemoryError
    cdef double* work = buf
    cdef double* q = buf + k * k
    cdef double* g = q + k
    cdef double* grad = g + k
    cdef double* pg = grad + k
    cdef double* q_new = pg + k
    cdef double* g_new = q_new + k
    cdef double* scratch = g_new + k
    cdef double val = 0.0, val_new = 0.0, pgn = 0.0, step = 1.0
    cdef double dir_dot, dd, acc
    cdef int it = 0, i, accepted, status = 0
    with nogil:
        _project(&q0[0], &floor[0], budget, q, scratch, k)
        status = _gamma_into(&prec[0, 0], &q[0], &alpha[0], work, g, &val, k)
        if status == 0:
            pgn = 1e308
            for it in range(1, max_iter + 1):
                for i in range(k):
                    grad[i] = -g[i] * g[i]
                    pg[i] = q[i] - grad[i]
                _project(pg, &floor[0], budget, q_new, scratch, k)
                acc = 0.0
                for i in range(k):
                    dd = q[i] - q_new[i]
                    acc += dd * dd
                pgn = sqrt(acc)
                if pgn <= pg_tol:
                    break
                accepted = 0
                while step >= 1e-18:
                    for i in range(k):
                        pg[i] = q[i] - step * grad[i]
                    _project(pg, &floor[0], budget, q_new, scratch, k)
                    dir_dot = 0.0
                    dd = 0.0
                    for i in range(k):
                        acc = q_new[i] - q[i]
                        dd += acc * acc
                        dir_dot += grad[i] * acc
                    if dd == 0.0:
                        break
                    if _gamma_into(&prec[0, 0], q_new, &alpha[0], work, g_new,
                                   &val_new, k) != 0:
                        status = -1
                        break
                    if val_new <= val + 1e-4 * dir_dot:
                        memcpy(q, q_new, k * sizeof(double))
                        memcpy(g, g_new, k * sizeof(double))
                        val = val_new
                        step = step * 1.3 if step * 1.3 < 1e8 else 1e8
                        accepted = 1
                        break
                    step *= 0.5
                if status != 0 or not accepted:
                    break
        memcpy(<double*> q_out.data, q, k * sizeof(double))
    free(buf)
    if status != 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return q_out, it, pgn


def dp_sweep(const double[::1] y not None, const double[::1] times not None,
             const double[::1] sigma2 not None, double cost):
    """Backward induction for the stopping boundary; see the pure twin."""
    cdef int n_y = y.shape[0]
    cdef int n = times.shape[0]
    cdef double dy = y[1] - y[0]
    cdef cnp.ndarray[double, ndim=1] boundary = np.empty(n)
    cdef double* w = <double*> malloc(2 * n_y * sizeof(double))
    if w == NULL:
        raise MemoryError
    cdef double* cont = w + n_y
    cdef int i, kk, i_zero, j, found
    cdef double p, stop_i, gain, d_prev, d_cur, t_k
    with nogil:
        i_zero = 0
        for i in range(n_y):
            if y[i] >= 0.0:
                i_zero = i
                break
        for i in range(n_y):
            gain = y[i] if y[i] > 0.0 else 0.0
            w[i] = gain - cost * times[n - 1]
        boundary[n - 1] = 0.0
        for kk in range(n - 2, -1, -1):
            p = (sigma2[kk] - sigma2[kk + 1]) / (2.0 * dy * dy)
            t_k = times[kk]
            for i in range(1, n_y - 1):
                cont[i] = w[i] + p * (w[i + 1] - 2.0 * w[i] + w[i - 1])
            gain = y[0] if y[0] > 0.0 else 0.0
            cont[0] = gain - cost * t_k
            gain = y[n_y - 1] if y[n_y - 1] > 0.0 else 0.0
            cont[n_y - 1] = gain - cost * t_k
            # boundary: first y >= 0 where stopping matches continuation
            found = 0
            d_prev = 0.0
            for j in range(i_zero, n_y):
                gain = y[j] if y[j] > 0.0 else 0.0
                d_cur = cont[j] - (gain - cost * t_k)
                if d_cur <= 0.0:
                    if j == i_zero:
                        boundary[kk] = 0.0
                    else:
                        boundary[kk] = y[j - 1] + dy * d_prev / (d_prev - d_cur)
                    found = 1
                    break
                d_prev = d_cur
            if not found:
                boundary[kk] = NAN
            for i in range(n_y):
                gain = y[i] if y[i] > 0.0 else 0.0
                stop_i = gain - cost * t_k
                w[i] = stop_i if stop_i > cont[i] else cont[i]
    free(w)
    return boundary
