"""Leading-eigenvector extraction, sign correction and alignment diagnostics."""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, DataError, DegenerateSpectrumError

DEFAULT_TOL = 1e-10
GAP_FLOOR = 1e-12
POWER_STEPS = 200
KRYLOV_DIM = 32
RESIDUAL_FLOOR = 16 * np.finfo(float).eps


class TopEigenpair(NamedTuple):
    lambda1: float
    vector: np.ndarray
    lambda2: float
    iterations: int


@dataclass(frozen=True)
class CentralityEstimate:
    u_hat: np.ndarray
    eigengap_hat: float
    m: int | None
    iterations: int
    lambda1: float
    ambiguous: bool = False


@dataclass(frozen=True)
class AlignmentDiagnostics:
    cos_theta: float
    sin_theta: float
    alpha: float
    epsilon: np.ndarray
    epsilon_norm: float


def _start_vector(n):
    # generic enough never to be orthogonal to a top eigenvector in practice,
    # and close to it for covariances of positively coupled nodes
    v = 1.0 + 0.1 * np.random.default_rng(20240229).standard_normal(n)
    return v / np.linalg.norm(v)


def _power_phase(m, v, steps, tol):
    rho, res = 0.0, np.inf
    for it in range(1, steps + 1):
        w = m @ v
        rho = float(v @ w)
        res = float(np.linalg.norm(w - rho * v))
        if res <= tol * max(1.0, abs(rho)):
            return rho, v, res, it
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # v is in the null space; M is zero along every direction we can reach
            return 0.0, v, 0.0, it
        v = w / nw
    return rho, v, res, steps


def _lanczos_phase(m, v, budget, tol, k):
    """Explicitly restarted Lanczos with full reorthogonalization."""
    n = m.shape[0]
    k = min(k, n)
    used = 0
    rho, res = float(v @ (m @ v)), np.inf
    scale = max(1.0, np.abs(m).sum(axis=1).max())
    rng = np.random.default_rng(7)
    while used < budget:
        q = np.empty((n, k))
        w = np.empty((n, k))
        cols = 0
        vec = v
        for j in range(k):
            if used >= budget:
                break
            q[:, j] = vec
            w[:, j] = m @ vec
            used += 1
            cols = j + 1
            r = w[:, j].copy()
            basis = q[:, :cols]
            r -= basis @ (basis.T @ r)
            r -= basis @ (basis.T @ r)
            beta = np.linalg.norm(r)
            if beta <= 1e-14 * scale:
                # invariant subspace; carry on with a fresh direction so that
                # eigenvectors the start vector missed can still be reached
                if cols == n:
                    break
                r = rng.standard_normal(n)
                r -= basis @ (basis.T @ r)
                r -= basis @ (basis.T @ r)
                beta = np.linalg.norm(r)
                if beta <= 1e-8:
                    break
            vec = r / beta
        h = q[:, :cols].T @ w[:, :cols]
        theta, y = np.linalg.eigh((h + h.T) / 2.0)
        y1 = y[:, -1]
        v = q[:, :cols] @ y1
        nv = np.linalg.norm(v)
        v /= nv
        mv = (w[:, :cols] @ y1) / nv
        rho = float(theta[-1])
        res = float(np.linalg.norm(mv - rho * v))
        if res <= tol * max(1.0, abs(rho)):
            return rho, v, res, used
    return rho, v, res, used


def _top_pair(m, tol, max_iter, v0, power=True):
    v = v0 / np.linalg.norm(v0)
    used = 0
    if power:
        steps = min(POWER_STEPS, max_iter)
        rho, v, res, used = _power_phase(m, v, steps, tol)
        if res <= tol * max(1.0, abs(rho)):
            return rho, v, res, used
    rho, v, res, more = _lanczos_phase(m, v, max_iter - used, tol, KRYLOV_DIM)
    used += more
    if res > tol * max(1.0, abs(rho)):
        raise ConvergenceError(
            f"leading eigenvector did not converge in {used} iterations (residual {res:.3e})",
            residual=res, iterations=used,
        )
    return rho, v, res, used


def _check_symmetric(mat):
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DataError(f"expected a square matrix, got shape {mat.shape}")
    scale = max(1.0, np.abs(mat).max())
    if np.abs(mat - mat.T).max() > 1e-10 * scale:
        raise DataError("matrix is not symmetric")
    return (mat + mat.T) / 2.0


def leading_eigenvector(mat, tol=DEFAULT_TOL, max_iter=None, v0=None):
    """Top eigenpair and runner-up eigenvalue of a symmetric PSD matrix.

    Power iteration with a Rayleigh-quotient residual test, switching to
    restarted Lanczos if power iteration has not converged after
    ``POWER_STEPS`` matvecs. The second eigenvalue comes from the same solver
    run on the deflated matrix. Once the gap is known the top vector is
    refined until ``residual <= tol * gap``, which bounds the angle error by
    ``tol`` (or by rounding level when the gap is tiny).
    """
    mat = _check_symmetric(mat)
    n = mat.shape[0]
    if max_iter is None:
        max_iter = 100 * n + 1000
    v0 = _start_vector(n) if v0 is None else np.asarray(v0, dtype=np.float64)
    lam1, v, res, iters = _top_pair(mat, tol, max_iter, v0)
    if n == 1:
        return TopEigenpair(lam1, np.ones(1), 0.0, iters)

    # Krylov rather than power steps here: a start vector lying close to the
    # deflated direction makes a single power step look converged
    deflated = mat - lam1 * np.outer(v, v)
    x = _start_vector(n)[::-1].copy()
    x -= (x @ v) * v
    lam2, _, _, it2 = _top_pair(deflated, tol, max_iter, x, power=False)
    iters += it2
    gap = lam1 - lam2
    if gap < GAP_FLOOR * max(1.0, abs(lam1)):
        raise DegenerateSpectrumError(
            f"eigengap {gap:.3e} too small for a unique leading eigenvector",
            lambda1=lam1, lambda2=lam2,
        )
    # residual cannot go below rounding noise; past that the angle error is
    # about eps * |M| / gap, the same as for a dense solver
    target = max(tol * gap, RESIDUAL_FLOOR * max(1.0, abs(lam1)))
    if res > target:
        lam1, v, res, more = _lanczos_phase(mat, v, max_iter, target / max(1.0, abs(lam1)), KRYLOV_DIM)
        iters += more
        if res > target:
            raise ConvergenceError(
                f"could not refine the leading eigenvector to angle {tol:g} (residual {res:.3e})",
                residual=res, iterations=iters,
            )
    return TopEigenpair(lam1, v, lam2, iters)


def sign_correct(v, reference=None):
    """Flip ``v`` to align non-negatively with ``reference`` (default ``1/sqrt(n)``).

    Returns ``(vector, ambiguous)``; exact orthogonality leaves ``v`` as is and
    sets ``ambiguous``.
    """
    v = np.asarray(v, dtype=np.float64)
    ref = np.ones_like(v) if reference is None else np.asarray(reference, dtype=np.float64)
    s = float(v @ ref)
    if s == 0.0:
        return v.copy(), True
    return (v.copy() if s > 0 else -v), False


def alignment(u, u_hat):
    """Decompose ``u_hat = alpha * u + epsilon`` with ``epsilon`` orthogonal to ``u``."""
    u = np.asarray(u, dtype=np.float64)
    u_hat = np.asarray(u_hat, dtype=np.float64)
    alpha = float(u @ u_hat)
    eps = u_hat - alpha * u
    enorm = float(np.linalg.norm(eps))
    return AlignmentDiagnostics(cos_theta=alpha, sin_theta=enorm, alpha=alpha, epsilon=eps, epsilon_norm=enorm)


def sign_correction_guarantee(u, u_hat, reference=None):
    """Whether ``|<u, u_hat>| > sqrt(1 - <u, ref>^2)``, under which sign correction
    against ``ref`` is guaranteed to give ``<u, u_hat> >= 0``.

    ``u`` is a centrality vector, so ``<u, ref>`` is assumed non-negative.
    """
    u = np.asarray(u, dtype=np.float64)
    ref = np.full(u.shape, 1.0 / np.sqrt(u.size)) if reference is None else np.asarray(reference, float)
    c = float(u @ ref)
    return abs(float(u @ np.asarray(u_hat, float))) > np.sqrt(max(0.0, 1.0 - c * c))


def estimate_centrality(mat, m=None, reference=None, tol=DEFAULT_TOL, max_iter=None):
    """Sign-corrected leading eigenvector of a covariance matrix."""
    top = leading_eigenvector(mat, tol=tol, max_iter=max_iter)
    u_hat, ambiguous = sign_correct(top.vector, reference)
    return CentralityEstimate(
        u_hat=u_hat / np.linalg.norm(u_hat),
        eigengap_hat=float(top.lambda1 - top.lambda2),
        m=m,
        iterations=top.iterations,
        lambda1=float(top.lambda1),
        ambiguous=ambiguous,
    )
