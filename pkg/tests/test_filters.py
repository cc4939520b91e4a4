import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blindrank.errors import ConfigError, DataError
from blindrank.filters import (
    MAX_DEGREE,
    apply_filter,
    filter_from_spec,
    filter_matrix,
    filter_to_spec,
    leading_matches_centrality,
    poly,
    population_covariance,
    satisfies_assumption1,
    spectral,
)
from blindrank.graphs import exact_centrality, full_spectrum, gen_erdos_renyi, gen_named, is_connected


def connected_er(n, p, seed):
    for s in range(seed, seed + 1000):
        g = gen_erdos_renyi(n, p, seed=s)
        if is_connected(g):
            return g
    raise RuntimeError("no connected draw")


def test_identity_poly_is_identity(rng):
    g = gen_erdos_renyi(8, 0.5, seed=1)
    x = rng.standard_normal(8)
    assert np.array_equal(apply_filter(poly([1]), g, x), x)


def test_adjacency_filter_on_path():
    y = apply_filter(poly([0, 1]), gen_named("path", 3), np.array([1.0, 0, 0]))
    assert np.allclose(y, [0, 1, 0], atol=1e-15)


def test_sqrt_filter_on_k2():
    y = apply_filter(spectral("sqrt_abs"), gen_named("complete", 2), np.array([1.0, 0]))
    assert np.allclose(y, [1, 0], atol=1e-12)


def test_dimension_mismatch():
    with pytest.raises(DataError):
        apply_filter(poly([1]), gen_named("path", 3), np.ones(4))


def test_population_covariance_examples():
    p3 = gen_named("path", 3)
    pc = population_covariance(poly([0, 1]), p3)
    assert np.allclose(pc.matrix, [[1, 0, 1], [0, 2, 0], [1, 0, 1]], atol=1e-12)
    # A^2 on P3 has the double eigenvalue 2 (spectrum 2, 2, 0)
    assert pc.degenerate

    ident = population_covariance(poly([1]), gen_named("complete", 4))
    assert np.allclose(ident.matrix, np.eye(4))
    assert ident.eigengap == 0 and ident.degenerate


@pytest.mark.parametrize("seed", range(3))
def test_sqrt_covariance_is_abs_spectrum(seed):
    g = connected_er(30, 0.2, seed * 100)
    s = full_spectrum(g)
    expect = (s.eigenvectors * np.abs(s.eigenvalues)) @ s.eigenvectors.T
    pc = population_covariance(spectral("sqrt_abs"), g)
    assert np.abs(pc.matrix - expect).max() < 1e-10
    assert np.abs(pc.matrix - pc.matrix.T).max() < 1e-12
    assert np.linalg.eigvalsh(pc.matrix).min() > -1e-10


@pytest.mark.parametrize("f", [spectral("sqrt_abs"), poly([0.5, 1, 0.25]), spectral("heat:0.7"), poly([1, 2], normalize=True)])
def test_covariance_shares_eigenvectors(f):
    g = connected_er(20, 0.3, 5)
    s = full_spectrum(g)
    c = population_covariance(f, g).matrix
    h = f.scalar(s.eigenvalues, s.eigenvalues[0])
    for lam_h, v in zip(h, s.eigenvectors.T):
        assert np.abs(c @ v - lam_h**2 * v).max() < 1e-8


def test_covariance_equals_filter_twice(rng):
    g = connected_er(15, 0.3, 11)
    for f in (poly([0.2, 1.0, 0.3]), spectral("sqrt_abs"), spectral("heat:1.5")):
        h = filter_matrix(f, g)
        twice = np.column_stack([apply_filter(f, g, apply_filter(f, g, e)) for e in np.eye(g.n)])
        assert np.abs(population_covariance(f, g).matrix - twice).max() < 1e-9
        assert np.abs(h @ h - twice).max() < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 2), min_size=1, max_size=6), st.integers(0, 10_000))
def test_poly_matches_spectral_evaluation(coeffs, seed):
    # Horner evaluation in the vertex domain against H(lambda) through the eigenbasis
    g = gen_erdos_renyi(12, 0.3, seed=seed)
    x = np.random.default_rng(seed).standard_normal(12)
    f = poly(coeffs)
    s = full_spectrum(g)
    ref = s.eigenvectors @ (f.scalar(s.eigenvalues) * (s.eigenvectors.T @ x))
    scale = max(1.0, np.abs(ref).max())
    assert np.abs(apply_filter(f, g, x) - ref).max() < 1e-9 * scale


def test_batch_rows_filtered_independently(rng):
    g = connected_er(10, 0.4, 3)
    f = poly([1, 0.5, 0.1])
    x = rng.standard_normal((4, 10))
    ys = apply_filter(f, g, x)
    for row, y in zip(x, ys):
        assert np.allclose(apply_filter(f, g, row), y, atol=1e-13)


def test_assumption1_on_realized_spectrum():
    g = connected_er(40, 0.15, 2)
    assert satisfies_assumption1(spectral("sqrt_abs"), g)
    assert satisfies_assumption1(poly([0.3, 1.0]), g)
    assert not satisfies_assumption1(poly([1.0, -0.5]), g)
    assert not satisfies_assumption1(poly([1]), g)
    # bipartite: lambda and -lambda give the same squared response
    assert not satisfies_assumption1(poly([0, 1]), gen_named("path", 4))


@pytest.mark.parametrize("seed", range(5))
def test_assumption1_implies_centrality_leads(seed):
    g = connected_er(50, 0.12, seed * 37)
    u = exact_centrality(g)
    for f in (spectral("sqrt_abs"), poly([0.1, 1.0, 0.5]), spectral("heat:2")):
        if not satisfies_assumption1(f, g):
            continue
        w, v = np.linalg.eigh(population_covariance(f, g).matrix)
        assert 1 - abs(v[:, -1] @ u) < 1e-8


def test_leading_matches_centrality():
    for seed in range(5):
        g = connected_er(100, math.log(100) / 100, seed * 1000)
        assert leading_matches_centrality(spectral("sqrt_abs"), g)
    assert not leading_matches_centrality(poly([1]), gen_named("complete", 4))
    assert not leading_matches_centrality(poly([0, 1]), gen_named("complete", 2))


def test_spec_round_trip():
    for spec in ({"type": "poly", "coeffs": [0.0, 1.0, 0.5]}, {"type": "spectral", "name": "sqrt_abs"},
                 {"type": "spectral", "name": "heat:0.5"}, {"type": "poly", "coeffs": [1.0], "normalize": True}):
        assert filter_to_spec(filter_from_spec(spec)) == spec
    assert filter_from_spec("identity").name == "identity"


@pytest.mark.parametrize("bad", ["nope", {"type": "fir"}, "heat:x", {"type": "poly", "coeffs": []},
                                 {"type": "poly", "coeffs": [1.0] * (MAX_DEGREE + 2)}])
def test_bad_specs(bad):
    with pytest.raises(ConfigError):
        filter_from_spec(bad)


def test_normalized_poly_stays_bounded():
    g = gen_named("complete", 30)
    f = poly([0.0] * MAX_DEGREE + [1.0], normalize=True)
    y = apply_filter(f, g, np.ones(30))
    # the all-ones vector is the top eigenvector, so (A/lambda1)^64 leaves it unchanged
    assert np.allclose(y, 1.0, atol=1e-10)
