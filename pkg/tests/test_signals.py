import math

import numpy as np
import pytest

from blindrank.errors import ConfigError, DataError
from blindrank.filters import poly, population_covariance, spectral
from blindrank.graphs import gen_erdos_renyi, gen_named, is_connected
from blindrank.signals import BLOCK_ROWS, SignalBatch, draw_noise, sample_covariance, synthesize_batch


def connected_er(n, p, seed):
    while True:
        g = gen_erdos_renyi(n, p, seed=seed)
        if is_connected(g):
            return g
        seed += 1


def test_gaussian_moments():
    m = 100_000
    w = draw_noise(3, m, "gaussian", seed=4)
    assert np.abs(w.mean(axis=0)).max() < 4 / math.sqrt(m)
    assert np.linalg.norm(w.T @ w / m - np.eye(3), 2) < 5 / math.sqrt(m)


def test_rademacher_support():
    w = draw_noise(2, 4, "rademacher", seed=9)
    assert set(np.unique(w)) <= {-1.0, 1.0}
    big = draw_noise(4, 20_000, "rademacher", seed=9)
    assert np.linalg.norm(big.T @ big / 20_000 - np.eye(4), 2) < 5 / math.sqrt(20_000)


def test_noise_determinism_and_prefix():
    a = draw_noise(5, 10, seed=3)
    assert np.array_equal(a, draw_noise(5, 10, seed=3))
    assert not np.array_equal(a, draw_noise(5, 10, seed=4))
    # blocks are independent streams, so a longer draw extends a shorter one
    long = draw_noise(5, BLOCK_ROWS + 50, seed=3)
    assert np.array_equal(long[:10], a)
    assert np.array_equal(long[:BLOCK_ROWS], draw_noise(5, BLOCK_ROWS, seed=3))


@pytest.mark.parametrize("args", [(0, 5, "gaussian"), (3, 0, "gaussian"), (3, 5, "uniform")])
def test_noise_errors(args):
    with pytest.raises(ConfigError):
        draw_noise(*args, seed=0)


def test_identity_filter_returns_noise():
    g = gen_erdos_renyi(6, 0.5, seed=2)
    b = synthesize_batch(poly([1]), g, 50, seed=8)
    assert np.array_equal(b.samples, draw_noise(6, 50, seed=8))
    assert b.m == 50 and b.n == 6 and b.filter_id == "poly[1.0]"


def test_forced_noise_adjacency_filter():
    b = synthesize_batch(poly([0, 1]), gen_named("path", 3), 1, noise=[[1.0, 0, 0]])
    assert np.allclose(b.samples, [[0, 1, 0]])


def test_rademacher_radius():
    g = gen_named("star", 5)
    b = synthesize_batch(spectral("sqrt_abs"), g, 200, "rademacher", seed=1)
    h2 = math.sqrt(math.sqrt(4))  # sqrt of the star's spectral radius 2
    assert b.r == pytest.approx(math.sqrt(5) * h2)
    assert np.linalg.norm(b.samples, axis=1).max() <= b.r + 1e-12


def test_sample_covariance_examples():
    c = sample_covariance(np.array([[1.0, 2.0]]))
    assert np.array_equal(c.matrix, [[1, 2], [2, 4]]) and c.m == 1
    y = np.array([1.0, -2.0, 0.5])
    c = sample_covariance(np.array([y, -y, y, -y]))
    assert np.allclose(c.matrix, np.outer(y, y), atol=1e-15)


def test_sample_covariance_identity_concentration():
    b = synthesize_batch(poly([1]), gen_named("complete", 10), 100_000, seed=12)
    c = sample_covariance(b)
    assert np.linalg.norm(c.matrix - np.eye(10), 2) < 0.05
    assert np.abs(c.matrix - c.matrix.T).max() <= 1e-12
    assert np.linalg.eigvalsh(c.matrix).min() > -1e-10


def test_sample_covariance_er_concentration():
    g = connected_er(100, math.log(100) / 100, 0)
    f = spectral("sqrt_abs")
    cy = population_covariance(f, g).matrix
    c = sample_covariance(synthesize_batch(f, g, 100_000, seed=1))
    assert np.linalg.norm(c.matrix - cy, 2) < 0.05 * np.linalg.norm(cy, 2)


def test_sample_covariance_scale_equivariant(rng):
    y = rng.standard_normal((300, 7))
    a = sample_covariance(y).matrix
    b = sample_covariance(3.5 * y).matrix
    assert np.allclose(b, 3.5**2 * a, rtol=1e-13, atol=0)


def test_blockwise_sum_matches_direct(rng):
    y = rng.standard_normal((20_000, 6))
    direct = y.T @ y / y.shape[0]
    for block in (1000, 7, 20_000):
        assert np.abs(sample_covariance(y, block_rows=block).matrix - direct).max() < 1e-13


def test_compensation_on_long_offset_batch():
    # many identical large rows plus small ones: plain float accumulation drifts
    m = 200_000
    y = np.full((m, 2), 1.0)
    y[::2] *= -1
    y[:, 1] += 1e-8
    exact = np.array([[1.0, 0.0], [0.0, 1.0 + 1e-16]])
    exact[0, 1] = exact[1, 0] = np.mean(y[:, 0] * y[:, 1])
    c = sample_covariance(y, block_rows=1000).matrix
    assert np.abs(c - exact).max() < 1e-14


def test_error_decays_as_inverse_sqrt_m():
    g = connected_er(30, 0.2, 3)
    f = spectral("sqrt_abs")
    cy = population_covariance(f, g).matrix
    ms = np.array([100, 1000, 10_000, 100_000])
    med = []
    for k, m in enumerate(ms):
        errs = [np.linalg.norm(sample_covariance(synthesize_batch(f, g, m, seed=1000 * k + r)).matrix - cy, 2)
                for r in range(7)]
        med.append(np.median(errs))
    slope = np.polyfit(np.log(ms), np.log(med), 1)[0]
    assert abs(slope + 0.5) < 0.1


def test_batch_validation():
    with pytest.raises(DataError):
        SignalBatch(np.empty((0, 3)))
    with pytest.raises(DataError):
        SignalBatch(np.array([[1.0, np.nan]]))
    with pytest.raises(DataError):
        synthesize_batch(poly([1]), gen_named("path", 3), 1, noise=[[1.0, 0.0]])


def test_batch_reproducible_from_seed():
    g = gen_erdos_renyi(12, 0.3, seed=5)
    f = spectral("sqrt_abs")
    a = synthesize_batch(f, g, 77, "rademacher", seed=21).samples
    b = synthesize_batch(f, g, 77, "rademacher", seed=21).samples
    assert a.tobytes() == b.tobytes()
