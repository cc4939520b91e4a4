"""Blind centrality ranking (plain and thresholded) and concordance accounting.

Orderings store one code per unordered pair ``(i, j)``, ``i < j``, in row-major
order: ``J_ABOVE`` when node ``j`` is more central, ``I_ABOVE`` when node ``i``
is, ``TIED``, or ``ABSTAIN``.
"""
from dataclasses import asdict, dataclass
from itertools import groupby

import numpy as np

from . import kernels
from .errors import ConfigError, DataError
from .filters import PopulationCovariance
from .signals import SampleCovariance, SignalBatch, sample_covariance
from .spectral import estimate_centrality

J_ABOVE = 1
I_ABOVE = -1
TIED = 0
ABSTAIN = 2

# ground-truth ties, relative to the largest |entry|
TRUTH_TIE_REL = 1e-9

_CODE_NAMES = {J_ABOVE: "j_above", I_ABOVE: "i_above", TIED: "tied", ABSTAIN: "abstain"}
_NAME_CODES = {v: k for k, v in _CODE_NAMES.items()}


def n_pairs(n):
    return n * (n - 1) // 2


def pair_index(i, j, n):
    """Position of unordered pair ``{i, j}`` (0-based, ``i != j``) in the pair array."""
    if i > j:
        i, j = j, i
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@dataclass(frozen=True)
class NodeOrdering:
    n: int
    kind: str
    codes: np.ndarray
    tau: float = 0.0
    source: str = ""

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int8)
        if codes.shape != (n_pairs(self.n),):
            raise DataError(f"expected {n_pairs(self.n)} pair codes, got {codes.shape}")
        if self.kind not in ("weak", "partial"):
            raise DataError(f"unknown ordering kind {self.kind!r}")
        if self.kind == "weak" and (codes == ABSTAIN).any():
            raise DataError("weak orderings cannot abstain")
        codes.setflags(write=False)
        object.__setattr__(self, "codes", codes)

    def relation(self, i, j):
        """Relation between nodes ``i`` and ``j`` as seen from ``i``: 'above', 'below', 'tied' or 'abstain'."""
        if i == j:
            return "tied"
        c = int(self.codes[pair_index(i, j, self.n)])
        if c in (TIED, ABSTAIN):
            return _CODE_NAMES[c]
        j_wins = c == J_ABOVE
        if i > j:
            j_wins = not j_wins
        return "below" if j_wins else "above"

    def matrix(self):
        """``R[i, j] = +1`` if ``j`` is above ``i``, ``-1`` if below, 0 otherwise (ties and abstentions)."""
        r = np.zeros((self.n, self.n), dtype=np.int8)
        iu, ju = np.triu_indices(self.n, 1)
        strict = np.where(np.abs(self.codes) == 1, self.codes, 0)
        r[iu, ju] = strict
        r[ju, iu] = -strict
        return r

    @property
    def completeness(self):
        total = n_pairs(self.n)
        if total == 0:
            return 1.0
        return 1.0 - np.count_nonzero(self.codes == ABSTAIN) / total

    def is_transitive(self):
        """Strict relation is transitive (i < j and j < k imply i < k)."""
        r = self.matrix()
        above = (r == 1).astype(np.int64)
        # paths of length two that are not direct relations
        two = above @ above
        return not ((two > 0) & (above == 0)).any()

    def to_json(self):
        runs = [[_CODE_NAMES[int(c)], len(list(grp))] for c, grp in groupby(self.codes.tolist())]
        return {"n": self.n, "kind": self.kind, "tau": self.tau, "source": self.source, "pairs": runs}

    @classmethod
    def from_json(cls, obj):
        try:
            codes = [_NAME_CODES[name] for name, count in obj["pairs"] for _ in range(count)]
            return cls(int(obj["n"]), obj["kind"], np.array(codes, dtype=np.int8),
                       float(obj.get("tau", 0.0)), obj.get("source", ""))
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed ordering JSON: {exc}") from None


@dataclass(frozen=True)
class ConcordanceReport:
    concordant: int
    discordant: int
    abstained: int
    tied_pairs: int
    completeness: float
    # truth tied and the estimate abstained: counted in `abstained`, flagged here
    truth_tied_abstained: int = 0

    def to_json(self):
        return asdict(self)


def _vec(v):
    v = np.ascontiguousarray(v, dtype=np.float64)
    if v.ndim != 1 or not np.isfinite(v).all():
        raise DataError("expected a finite 1-D vector")
    return v


def truth_tie_tol(u):
    u = np.asarray(u, dtype=np.float64)
    return TRUTH_TIE_REL * float(np.abs(u).max()) if u.size else 0.0


def weak_order_from_vector(v, tie_tol=0.0, source=""):
    """``j`` above ``i`` iff ``v[i] < v[j] - tie_tol``; tied within ``tie_tol``."""
    v = _vec(v)
    return NodeOrdering(v.size, "weak", kernels.pair_codes(v, float(tie_tol), False), 0.0, source)


def truth_order(u, source="truth"):
    """Weak order of a ground-truth vector, with the relative tie tolerance."""
    return weak_order_from_vector(u, truth_tie_tol(u), source)


def threshold_order(v, tau, source=""):
    """Partial order abstaining on every pair with ``|v[i] - v[j]| <= tau``."""
    if not tau >= 0:
        raise ConfigError(f"threshold must be non-negative, got {tau}")
    v = _vec(v)
    return NodeOrdering(v.size, "partial", kernels.pair_codes(v, float(tau), True), float(tau), source)


def _covariance_of(data):
    if isinstance(data, SignalBatch):
        cov = sample_covariance(data)
        return cov.matrix, cov.m
    if isinstance(data, SampleCovariance):
        return data.matrix, data.m
    if isinstance(data, PopulationCovariance):
        return data.matrix, None
    raise DataError(f"cannot rank from {type(data).__name__}")


def rank_simple(data, reference=None):
    """Weak ordering induced by the sign-corrected top eigenvector of the covariance.

    ``data`` is a SignalBatch, a SampleCovariance, or a PopulationCovariance
    (the infinite-sample limit).
    """
    mat, m = _covariance_of(data)
    est = estimate_centrality(mat, m=m, reference=reference)
    return est, weak_order_from_vector(est.u_hat, 0.0, source="rank_simple")


def rank_threshold(data, tau, reference=None):
    if not tau > 0:
        raise ConfigError(f"threshold must be positive, got {tau}")
    mat, m = _covariance_of(data)
    est = estimate_centrality(mat, m=m, reference=reference)
    return est, threshold_order(est.u_hat, tau, source="rank_threshold")


def min_viable_threshold(u_true, u_hat, tie_tol=0.0):
    """Largest ``u_hat[j] - u_hat[i] > 0`` over pairs with ``u_true[j] <= u_true[i] + tie_tol``.

    Every threshold at or above the returned value is viable; 0 means the
    estimate already orders every pair correctly.
    """
    u_true, u_hat = _vec(u_true), _vec(u_hat)
    if u_true.shape != u_hat.shape:
        raise DataError("vectors differ in length")
    return float(kernels.min_viable_threshold(u_true, u_hat, float(tie_tol)))


def is_viable(u_true, u_hat, tau, tie_tol=0.0):
    """Whether every pair with ``u_hat[j] - u_hat[i] > tau`` has ``u_true[j] > u_true[i] + tie_tol``."""
    u_true, u_hat = _vec(u_true), _vec(u_hat)
    d = u_hat[None, :] - u_hat[:, None]
    ok = u_true[None, :] > u_true[:, None] + tie_tol
    return bool(ok[d > tau].all())


def concordance(truth, est):
    """Classify every pair of ``est`` against ``truth``.

    A tie in ``truth`` is concordant only if ``est`` ties it too; a strict
    estimate there is discordant and an abstention is counted as abstained.
    Pairs ``est`` ties while ``truth`` is strict land in ``tied_pairs``.
    """
    if truth.n != est.n:
        raise DataError(f"orderings over {truth.n} and {est.n} nodes")
    conc, disc, abst, tied, tied_abst = kernels.concordance_counts(truth.codes, est.codes)
    total = n_pairs(truth.n)
    return ConcordanceReport(
        concordant=int(conc),
        discordant=int(disc),
        abstained=int(abst),
        tied_pairs=int(tied),
        completeness=1.0 - abst / total if total else 1.0,
        truth_tied_abstained=int(tied_abst),
    )


def tau_sweep(u_true, u_hat, taus, tie_tol=None):
    """Concordant, discordant and abstained counts of ``threshold_order(u_hat, tau)`` for each tau."""
    u_true, u_hat = _vec(u_true), _vec(u_hat)
    tol = truth_tie_tol(u_true) if tie_tol is None else float(tie_tol)
    return kernels.tau_sweep(u_true, u_hat, _vec(taus), tol)


def pairwise_errors(u_true, u_hat, ref):
    """Boolean per node: does ``u_hat`` order it against ``ref`` the wrong way round?"""
    u_true, u_hat = _vec(u_true), _vec(u_hat)
    wrong = np.sign(u_hat - u_hat[ref]) != np.sign(u_true - u_true[ref])
    wrong[ref] = False
    return wrong
