"""Filtered white-noise observations and their sample covariance."""
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError
from .filters import filter_matrix

NOISE_KINDS = ("gaussian", "rademacher")

# Rows per independent RNG stream. Fixed, so output never depends on how
# blocks are scheduled across workers.
BLOCK_ROWS = 4096


@dataclass(frozen=True)
class SignalBatch:
    """``samples[l]`` is the l-th observed signal ``y = H(A) w``."""

    samples: np.ndarray
    noise_kind: str = "gaussian"
    seed: int | None = None
    filter_id: str = ""
    r: float | None = None

    def __post_init__(self):
        y = np.asarray(self.samples, dtype=np.float64)
        if y.ndim != 2 or y.shape[0] < 1:
            raise DataError("a signal batch needs at least one row of node values")
        if not np.isfinite(y).all():
            raise DataError("signal batch contains non-finite values")
        object.__setattr__(self, "samples", y)

    @property
    def m(self):
        return self.samples.shape[0]

    @property
    def n(self):
        return self.samples.shape[1]


@dataclass(frozen=True)
class SampleCovariance:
    matrix: np.ndarray
    m: int


def _block_rng(entropy, block):
    ss = np.random.SeedSequence(entropy=entropy, spawn_key=(block,))
    return np.random.Generator(np.random.PCG64(ss))


def _noise_block(rng, rows, n, kind):
    if kind == "gaussian":
        return rng.standard_normal((rows, n))
    return rng.choice(np.array([-1.0, 1.0]), size=(rows, n))


def draw_noise(n, m, kind="gaussian", seed=None, block_rows=BLOCK_ROWS):
    """Zero-mean, identity-covariance rows.

    Row blocks of ``block_rows`` each draw from their own stream keyed by
    ``(seed, block index)``.
    """
    if n < 1 or m < 1:
        raise ConfigError("noise dimensions must be positive")
    if kind not in NOISE_KINDS:
        raise ConfigError(f"unknown noise kind {kind!r}; expected one of {NOISE_KINDS}")
    entropy = np.random.SeedSequence(seed).entropy
    out = np.empty((m, n))
    for b, start in enumerate(range(0, m, block_rows)):
        stop = min(start + block_rows, m)
        out[start:stop] = _noise_block(_block_rng(entropy, b), stop - start, n, kind)
    return out


def synthesize_batch(f, g, m, kind="gaussian", seed=None, noise=None):
    """Observe ``m`` signals ``H(A) w``; ``noise`` overrides the drawn excitation."""
    h = filter_matrix(f, g)
    w = draw_noise(g.n, m, kind, seed) if noise is None else np.atleast_2d(np.asarray(noise, float))
    if w.shape[1] != g.n:
        raise DataError("noise width does not match the graph")
    # rademacher rows have norm sqrt(n) exactly; for gaussian this is a proxy
    r = float(np.sqrt(g.n) * np.linalg.norm(h, 2))
    return SignalBatch(w @ h, noise_kind=kind, seed=seed, filter_id=f.filter_id, r=r)


def sample_covariance(batch, block_rows=8192):
    """Uncentered ``(1/m) sum y y^T``.

    Row blocks are reduced with BLAS and the block sums combined with
    Kahan compensation, which keeps very long batches from drifting.
    """
    y = batch.samples if isinstance(batch, SignalBatch) else np.asarray(batch, dtype=np.float64)
    if y.ndim == 1:
        y = y[None, :]
    m, n = y.shape
    if m < 1:
        raise DataError("covariance needs at least one sample")
    total = np.zeros((n, n))
    comp = np.zeros((n, n))
    for start in range(0, m, block_rows):
        blk = y[start:start + block_rows]
        term = blk.T @ blk - comp
        t = total + term
        comp = (t - total) - term
        total = t
    c = total / m
    return SampleCovariance((c + c.T) / 2.0, m)
