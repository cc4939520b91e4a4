"""Compiled kernels against the numpy fallback, and Jacobi against LAPACK."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blindrank import kernels

pytestmark = pytest.mark.skipif("compiled" not in kernels.BACKENDS, reason="extension not built")

PY = kernels.get_backend("python")


def CO():
    return kernels.get_backend("compiled")


def test_backend_registry():
    assert kernels.BACKEND in kernels.BACKENDS
    with pytest.raises(ValueError):
        kernels.get_backend("fortran")


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**31), st.floats(0, 0.5), st.booleans())
def test_pair_codes_equal(n, seed, tol, abstain):
    v = np.round(np.random.default_rng(seed).standard_normal(n), 1)
    assert np.array_equal(CO().pair_codes(v, tol, abstain), PY.pair_codes(v, tol, abstain))


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**31))
def test_concordance_counts_equal(n, seed):
    rng = np.random.default_rng(seed)
    k = n * (n - 1) // 2
    truth = rng.choice(np.array([-1, 0, 1], dtype=np.int8), k)
    est = rng.choice(np.array([-1, 0, 1, 2], dtype=np.int8), k)
    assert tuple(CO().concordance_counts(truth, est)) == tuple(PY.concordance_counts(truth, est))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 40), st.integers(0, 2**31), st.sampled_from([0.0, 1e-9, 0.05]))
def test_threshold_kernels_equal(n, seed, tie_tol):
    rng = np.random.default_rng(seed)
    u = np.round(rng.random(n), 2)
    uh = rng.standard_normal(n)
    assert CO().min_viable_threshold(u, uh, tie_tol) == PY.min_viable_threshold(u, uh, tie_tol)
    taus = np.linspace(0, 2, 9)
    for a, b in zip(CO().tau_sweep(u, uh, taus, tie_tol), PY.tau_sweep(u, uh, taus, tie_tol)):
        assert np.array_equal(a, b)


@pytest.mark.parametrize("name", ["compiled", "python"])
@pytest.mark.parametrize("n", [1, 2, 5, 17, 32])
def test_jacobi_matches_lapack(name, n):
    rng = np.random.default_rng(n)
    x = rng.standard_normal((n, n))
    a = x + x.T
    w, v, sweeps = kernels.get_backend(name).jacobi_eigh(a)
    ref = np.linalg.eigvalsh(a)[::-1]
    assert np.abs(w - ref).max() < 1e-12 * max(1, np.abs(ref).max())
    assert np.abs(v.T @ v - np.eye(n)).max() < 1e-12
    assert np.abs(a @ v - v * w).max() < 1e-11 * max(1, np.abs(ref).max())
    assert sweeps >= 0


def test_jacobi_backends_agree():
    rng = np.random.default_rng(9)
    x = rng.standard_normal((20, 20))
    a = x @ x.T
    wc, vc, _ = CO().jacobi_eigh(a)
    wp, vp, _ = PY.jacobi_eigh(a)
    assert np.allclose(wc, wp, atol=1e-12)
    # same eigenvectors up to sign
    assert np.allclose(np.abs(np.sum(vc * vp, axis=0)), 1, atol=1e-10)
