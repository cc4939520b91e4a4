"""Numpy implementations of the pairwise and Jacobi kernels.

These are the reference semantics for ``blindrank._ext``. Pairs are laid out
row-major over ``i < j``; pair codes are ``sign(v[j] - v[i])`` for strict
relations, ``0`` for ties and ``2`` for abstentions.
"""
import numpy as np

TIED = 0
ABSTAIN = 2


def _pair_diff(v):
    iu, ju = np.triu_indices(v.shape[0], 1)
    return v[ju] - v[iu]


def pair_codes(v, tol, abstain):
    v = np.ascontiguousarray(v, dtype=np.float64)
    d = _pair_diff(v)
    codes = np.sign(d).astype(np.int8)
    codes[np.abs(d) <= tol] = ABSTAIN if abstain else TIED
    return codes


def concordance_counts(truth, est):
    truth = np.asarray(truth, dtype=np.int8)
    est = np.asarray(est, dtype=np.int8)
    if truth.shape != est.shape:
        raise ValueError("pair arrays differ in length")
    abst = est == ABSTAIN
    truth_tied = truth == TIED
    est_tied = est == TIED
    live = ~abst
    conc = np.count_nonzero(live & truth_tied & est_tied)
    conc += np.count_nonzero(live & ~truth_tied & (est == truth))
    disc = np.count_nonzero(live & truth_tied & ~est_tied)
    disc += np.count_nonzero(live & ~truth_tied & ~est_tied & (est != truth))
    return (
        int(conc),
        int(disc),
        int(np.count_nonzero(abst)),
        int(np.count_nonzero(live & ~truth_tied & est_tied)),
        int(np.count_nonzero(abst & truth_tied)),
    )


def min_viable_threshold(u, uhat, tie_tol):
    u = np.asarray(u, dtype=np.float64)
    uhat = np.asarray(uhat, dtype=np.float64)
    if u.shape != uhat.shape:
        raise ValueError("vectors differ in length")
    # d[i, j] = uhat[j] - uhat[i]
    d = uhat[None, :] - uhat[:, None]
    bad = (u[None, :] <= u[:, None] + tie_tol) & (d > 0)
    return float(d[bad].max()) if bad.any() else 0.0


def tau_sweep(u, uhat, taus, tie_tol):
    u = np.asarray(u, dtype=np.float64)
    uhat = np.asarray(uhat, dtype=np.float64)
    taus = np.asarray(taus, dtype=np.float64)
    if u.shape != uhat.shape:
        raise ValueError("vectors differ in length")
    du = _pair_diff(u)
    dh = _pair_diff(uhat)
    agree = (np.abs(du) > tie_tol) & ((du > 0) == (dh > 0))
    live = np.abs(dh)[None, :] > taus[:, None]
    conc = np.count_nonzero(live & agree[None, :], axis=1).astype(np.int64)
    disc = np.count_nonzero(live & ~agree[None, :], axis=1).astype(np.int64)
    npairs = du.shape[0]
    return conc, disc, npairs - conc - disc


def jacobi_eigh(a_in, tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition (slow; meant for small oracles)."""
    a = np.array(a_in, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    sweep = 0
    while sweep < max_sweeps:
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2))
        if off <= tol * scale:
            break
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                x, y = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * x - s * y, s * x + c * y
                x, y = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * x - s * y, s * x + c * y
                x, y = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * x - s * y, s * x + c * y
    w = np.diagonal(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order], sweep
