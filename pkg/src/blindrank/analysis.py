"""Closed-form sampling bounds, CRGM predictions and fitting helpers."""
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ConfigError, DataError, UndefinedBoundError

CRGM_BETA_SLOPE = 2.275


@dataclass(frozen=True)
class SamplingBoundInputs:
    """``C`` stands in for the unspecified Theta(||C_y||) constant."""

    C: float
    delta: float
    eta: float
    u: np.ndarray

    def __post_init__(self):
        if not self.C > 0:
            raise ConfigError("bound constant C must be positive")
        if not self.delta > 0:
            raise ConfigError("eigengap delta must be positive")
        if not 0 < self.eta <= 1:
            raise ConfigError("failure probability eta must lie in (0, 1]")
        object.__setattr__(self, "u", np.asarray(self.u, dtype=np.float64))

    @property
    def n(self):
        return self.u.size

    @property
    def ones_alignment(self):
        """``<u, 1/sqrt(n)>``."""
        return float(self.u.sum() / math.sqrt(self.n))


@dataclass(frozen=True)
class CrgmModel:
    n: int
    gamma: float
    beta: float
    predicted: np.ndarray


@dataclass(frozen=True)
class ErrorRateModelFit:
    C0: float
    C1: float
    r_squared: float
    cells: int


def theorem2_sample_bound(inp, i, j):
    """Samples needed for the plain ranking to order nodes ``i, j`` correctly w.p. ``1 - eta``.

    ``-log(eta) * (C/delta)^2 * max(2/(u_j - u_i)^2, 1/<u, 1/sqrt(n)>^2)``
    """
    diff = inp.u[j] - inp.u[i]
    if abs(diff) <= 1e-15:
        raise UndefinedBoundError(f"nodes {i} and {j} have equal centrality; the bound is undefined")
    branch = max(2.0 / diff**2, 1.0 / inp.ones_alignment**2)
    return -math.log(inp.eta) * (inp.C / inp.delta) ** 2 * branch


def prop2_viability_check(inp, tau, m):
    """``(C/delta) sqrt(-log(eta)/m) < min(tau/sqrt(2), <u, 1/sqrt(n)>)``."""
    if not tau > 0:
        raise ConfigError("tau must be positive")
    if m < 1:
        raise ConfigError("m must be at least 1")
    lhs = inp.C / inp.delta * math.sqrt(-math.log(inp.eta) / m)
    return lhs < min(tau / math.sqrt(2.0), inp.ones_alignment)


def threshold_prescription(c_fit, m):
    if not c_fit > 0:
        raise ConfigError("prescription constant must be positive")
    return c_fit / math.sqrt(m)


def fit_inverse_sqrt(m_values, taus):
    """Least-squares ``tau ~ C / sqrt(m)`` through the origin; returns ``(C, R^2)``."""
    x = 1.0 / np.sqrt(np.asarray(m_values, dtype=np.float64))
    y = np.asarray(taus, dtype=np.float64)
    c = float(x @ y / (x @ x))
    return c, _r_squared(y, c * x)


def _r_squared(y, yhat):
    ss_res = float(((y - yhat) ** 2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return 1.0 - ss_res / ss_tot


def crgm_base_profile(n):
    """Unit-norm CRGM centrality profile ``sqrt(10)/2 (i/n)^2 + 1/sqrt(2)``, i = 1..n."""
    x = np.arange(1, n + 1) / n
    v = math.sqrt(10) / 2 * x**2 + 1 / math.sqrt(2)
    return v / np.linalg.norm(v)


def crgm_predicted_centrality(n, gamma):
    if not 0 < gamma <= 1:
        raise ConfigError("gamma must lie in (0, 1]; the offset diverges at 0")
    beta = CRGM_BETA_SLOPE * (1 - gamma) / gamma
    v = crgm_base_profile(n) + beta / math.sqrt(n)
    return CrgmModel(n=n, gamma=gamma, beta=beta, predicted=v / np.linalg.norm(v))


def fit_error_rate_model(rates, u, ref_node):
    """Fit ``log(rate) = C0 * m * (u_i - u_ref)^2 + C1`` over cells with non-zero rate.

    ``rates`` maps ``(node, m)`` to the empirical error frequency.
    """
    u = np.asarray(u, dtype=np.float64)
    xs, ys = [], []
    for (node, m), rate in rates.items():
        if node == ref_node or not rate > 0:
            continue
        xs.append(m * (u[node] - u[ref_node]) ** 2)
        ys.append(math.log(rate))
    if len(xs) < 3:
        raise DataError(f"need at least 3 cells with a non-zero error rate, have {len(xs)}")
    x = np.asarray(xs)
    y = np.asarray(ys)
    if np.ptp(x) == 0:
        raise DataError("all cells share the same regressor value")
    design = np.column_stack([x, np.ones_like(x)])
    (c0, c1), *_ = np.linalg.lstsq(design, y, rcond=None)
    return ErrorRateModelFit(float(c0), float(c1), _r_squared(y, design @ np.array([c0, c1])), len(xs))


def worst_case_perturbation(u, i, j, alpha):
    """Orthogonal error of norm ``sqrt(1 - alpha^2)`` that most shrinks ``u_j - u_i``."""
    u = np.asarray(u, dtype=np.float64)
    if abs(np.linalg.norm(u) - 1.0) > 1e-10:
        raise ConfigError("u must be a unit vector")
    if not 0 <= alpha <= 1:
        raise ConfigError("alpha must lie in [0, 1]")
    d = u[j] - u[i]
    if not d > 0:
        raise ConfigError("worst-case perturbation needs u_j > u_i")
    direction = d * u
    direction[i] += 1.0
    direction[j] -= 1.0
    return math.sqrt((1 - alpha**2) / (2 - d**2)) * direction


def spearman(x, y):
    """Spearman rank correlation (average ranks for ties) with a t-approximation p-value."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = x.size
    if n != y.size:
        raise DataError("inputs differ in length")
    if n < 3:
        raise DataError("spearman needs at least 3 observations")
    rx = stats.rankdata(x)
    ry = stats.rankdata(y)
    if np.ptp(rx) == 0 or np.ptp(ry) == 0:
        raise DataError("rank correlation is undefined for a constant input")
    rx -= rx.mean()
    ry -= ry.mean()
    rho = float(np.clip(rx @ ry / math.sqrt((rx @ rx) * (ry @ ry)), -1.0, 1.0))
    if abs(rho) == 1.0:
        return rho, 0.0
    t = rho * math.sqrt((n - 2) / (1 - rho**2))
    return rho, float(2 * stats.t.sf(abs(t), n - 2))
