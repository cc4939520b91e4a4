"""Graph construction and exact spectral ground truth.

Graphs are stored as dense symmetric adjacency matrices; everything here runs
at a few hundred nodes, where a dense symmetric eigensolver is the right tool.
"""
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateSpectrumError, DisconnectedGraphError

NAMED_KINDS = ("star", "path", "cycle", "complete")

# lambda1 - lambda2 below this (times max(1, lambda1)) is a repeated top eigenvalue
DEGENERATE_GAP = 1e-10


@dataclass(frozen=True)
class Graph:
    adjacency: np.ndarray
    kind: str = "custom"
    seed: int | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ConfigError(f"adjacency must be a non-empty square matrix, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ConfigError("adjacency must be symmetric")
        if (a < 0).any():
            raise ConfigError("adjacency entries must be non-negative")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @property
    def n(self):
        return self.adjacency.shape[0]

    @property
    def edge_count(self):
        return int(np.count_nonzero(np.triu(self.adjacency, 1)))


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted descending; column ``l`` of ``eigenvectors`` pairs with ``eigenvalues[l]``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _rng(seed):
    return np.random.default_rng(seed)


def _sample_upper(prob, seed):
    """Symmetric 0/1 matrix with independent edges above the diagonal."""
    n = prob.shape[0]
    draws = _rng(seed).random((n, n))
    upper = np.triu(draws < prob, 1)
    a = upper.astype(np.float64)
    return a + a.T


def gen_erdos_renyi(n, p, seed=None):
    if n < 1:
        raise ConfigError("n must be positive")
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"edge probability must lie in [0, 1], got {p}")
    prob = np.full((n, n), float(p))
    return Graph(_sample_upper(prob, seed), kind="er", seed=seed, params={"n": n, "p": p})


def crgm_edge_probability(i, j, n, gamma):
    """Mixed-CRGM edge probability for 1-based node indices ``i`` and ``j``."""
    i = np.asarray(i, dtype=np.float64)
    j = np.asarray(j, dtype=np.float64)
    return gamma * ((i / n) ** 2 + (j / n) ** 2) / 2.0 + (1.0 - gamma)


def crgm_probability_matrix(n, gamma):
    # 0-based storage, 1-based model indices
    idx = np.arange(1, n + 1)
    prob = crgm_edge_probability(idx[:, None], idx[None, :], n, gamma)
    np.fill_diagonal(prob, 0.0)
    return prob


def gen_mixed_crgm(n, gamma, seed=None):
    """Mixed circular random graph; ``gamma=1`` is the plain CRGM, ``gamma=0`` the complete graph.

    Self-loops are excluded.
    """
    if n < 1:
        raise ConfigError("n must be positive")
    if not 0.0 <= gamma <= 1.0:
        raise ConfigError(f"gamma must lie in [0, 1], got {gamma}")
    prob = crgm_probability_matrix(n, gamma)
    return Graph(_sample_upper(prob, seed), kind="crgm", seed=seed, params={"n": n, "gamma": gamma})


def gen_named(kind, n):
    if kind not in NAMED_KINDS:
        raise ConfigError(f"unknown graph kind {kind!r}; expected one of {NAMED_KINDS}")
    if n < 2:
        raise ConfigError("named graphs need n >= 2")
    a = np.zeros((n, n))
    if kind == "complete":
        a[:] = 1.0
        np.fill_diagonal(a, 0.0)
    elif kind == "star":
        a[0, 1:] = a[1:, 0] = 1.0
    else:
        i = np.arange(n - 1)
        a[i, i + 1] = a[i + 1, i] = 1.0
        if kind == "cycle" and n > 2:
            a[0, n - 1] = a[n - 1, 0] = 1.0
    return Graph(a, kind=kind, params={"n": n})


def is_connected(g):
    """Breadth-first search from node 0."""
    n = g.n
    nbrs = [np.flatnonzero(row) for row in g.adjacency]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in nbrs[i]:
            if not seen[j]:
                seen[j] = True
                queue.append(j)
    return bool(seen.all())


def full_spectrum(g):
    a = g.adjacency if isinstance(g, Graph) else np.asarray(g, dtype=np.float64)
    w, v = np.linalg.eigh(a)
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


def exact_centrality(g):
    """Positive-signed unit leading eigenvector of the adjacency matrix."""
    if not is_connected(g):
        raise DisconnectedGraphError("eigenvector centrality needs a connected graph")
    spec = full_spectrum(g)
    lam = spec.eigenvalues
    if g.n > 1 and lam[0] - lam[1] < DEGENERATE_GAP * max(1.0, lam[0]):
        raise DegenerateSpectrumError(
            f"leading adjacency eigenvalue is repeated ({lam[0]:.6g}, {lam[1]:.6g})",
            lambda1=lam[0], lambda2=lam[1],
        )
    u = spec.eigenvectors[:, 0].copy()
    if u.sum() < 0:
        u = -u
    return u / np.linalg.norm(u)


def median_centrality_node(u):
    """Node holding the lower-median centrality value."""
    return int(np.argsort(u, kind="stable")[(len(u) - 1) // 2])
