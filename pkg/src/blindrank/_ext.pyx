# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled pairwise and Jacobi kernels.

Signatures and results match ``blindrank._fallback`` exactly; see that module
for the reference semantics. Pair order is row-major over i < j.
"""
import numpy as np

from libc.math cimport fabs, sqrt

cdef signed char TIED = 0
cdef signed char ABSTAIN = 2


def pair_codes(const double[::1] v, double tol, bint abstain):
    cdef Py_ssize_t n = v.shape[0]
    cdef Py_ssize_t i, j, k = 0
    cdef double d
    out = np.empty(n * (n - 1) // 2, dtype=np.int8)
    cdef signed char[::1] codes = out
    cdef signed char flat = ABSTAIN if abstain else TIED
    for i in range(n):
        for j in range(i + 1, n):
            d = v[j] - v[i]
            if fabs(d) <= tol:
                codes[k] = flat
            elif d > 0:
                codes[k] = 1
            else:
                codes[k] = -1
            k += 1
    return out


def concordance_counts(const signed char[::1] truth, const signed char[::1] est):
    cdef Py_ssize_t k, npairs = truth.shape[0]
    cdef long long conc = 0, disc = 0, abst = 0, est_tied = 0, tied_abst = 0
    cdef signed char t, e
    if est.shape[0] != npairs:
        raise ValueError("pair arrays differ in length")
    for k in range(npairs):
        t = truth[k]
        e = est[k]
        if e == ABSTAIN:
            abst += 1
            if t == TIED:
                tied_abst += 1
        elif t == TIED:
            if e == TIED:
                conc += 1
            else:
                disc += 1
        elif e == TIED:
            est_tied += 1
        elif e == t:
            conc += 1
        else:
            disc += 1
    return conc, disc, abst, est_tied, tied_abst


def min_viable_threshold(const double[::1] u, const double[::1] uhat, double tie_tol):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t i, j
    cdef double best = 0.0, d
    if uhat.shape[0] != n:
        raise ValueError("vectors differ in length")
    for i in range(n):
        for j in range(n):
            d = uhat[j] - uhat[i]
            if d > best and u[j] <= u[i] + tie_tol:
                best = d
    return best


def tau_sweep(const double[::1] u, const double[::1] uhat, const double[::1] taus,
              double tie_tol):
    cdef Py_ssize_t n = u.shape[0], ntau = taus.shape[0]
    cdef Py_ssize_t i, j, t
    cdef double du, dh, gap
    cdef bint agree
    conc_out = np.zeros(ntau, dtype=np.int64)
    disc_out = np.zeros(ntau, dtype=np.int64)
    cdef long long[::1] conc = conc_out
    cdef long long[::1] disc = disc_out
    if uhat.shape[0] != n:
        raise ValueError("vectors differ in length")
    for i in range(n):
        for j in range(i + 1, n):
            du = u[j] - u[i]
            dh = uhat[j] - uhat[i]
            gap = fabs(dh)
            agree = fabs(du) > tie_tol and (du > 0) == (dh > 0)
            for t in range(ntau):
                if gap > taus[t]:
                    if agree:
                        conc[t] += 1
                    else:
                        disc[t] += 1
    npairs = n * (n - 1) // 2
    return conc_out, disc_out, npairs - conc_out - disc_out


def jacobi_eigh(a_in, double tol=1e-14, int max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns eigenvalues sorted descending, matching eigenvector columns and
    the number of sweeps used.
    """
    a_arr = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] a = a_arr
    cdef Py_ssize_t n = a.shape[0]
    v_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, k
    cdef int sweep = 0
    cdef double off, scale, apq, theta, t, c, s, x, y
    scale = 0.0
    for p in range(n):
        for q in range(n):
            scale += a[p, q] * a[p, q]
    scale = sqrt(scale)
    while sweep < max_sweeps:
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if sqrt(off) <= tol * scale:
            break
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * y
                    a[k, q] = s * x + c * y
                for k in range(n):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * y
                    a[q, k] = s * x + c * y
                for k in range(n):
                    x = v[k, p]
                    y = v[k, q]
                    v[k, p] = c * x - s * y
                    v[k, q] = s * x + c * y
    w = np.diagonal(a_arr).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v_arr[:, order], sweep
