"""Graph filters and the exact covariance of filtered white noise."""
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, DataError
from .graphs import DEGENERATE_GAP, exact_centrality, full_spectrum

MAX_DEGREE = 64


@dataclass(frozen=True)
class GraphFilter:
    """Either a polynomial in the adjacency matrix or a spectral response.

    ``coeffs[k]`` multiplies ``A**k``. With ``normalize`` set, the polynomial is
    evaluated in ``A / lambda_1`` instead, which keeps high powers bounded.
    """

    kind: str
    coeffs: tuple = ()
    response: Callable | None = field(default=None, compare=False)
    name: str = ""
    normalize: bool = False

    def __post_init__(self):
        if self.kind == "poly":
            if not 1 <= len(self.coeffs) <= MAX_DEGREE + 1:
                raise ConfigError(f"polynomial filters need 1..{MAX_DEGREE + 1} coefficients")
            object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        elif self.kind == "spectral":
            if self.response is None:
                raise ConfigError("spectral filter needs a response function")
        else:
            raise ConfigError(f"unknown filter kind {self.kind!r}")

    @property
    def filter_id(self):
        if self.kind == "spectral":
            return self.name
        tag = "poly[" + ",".join(repr(c) for c in self.coeffs) + "]"
        return tag + ("/norm" if self.normalize else "")

    @property
    def nonnegative_coeffs(self):
        """Form-level check for polynomials: all coefficients >= 0, one > 0."""
        if self.kind != "poly":
            return None
        return all(c >= 0 for c in self.coeffs) and any(c > 0 for c in self.coeffs)

    def scalar(self, lam, lambda1=None):
        lam = np.asarray(lam, dtype=np.float64)
        if self.kind == "spectral":
            return self.response(lam, lambda1)
        x = lam / lambda1 if self.normalize else lam
        out = np.zeros_like(x)
        for c in reversed(self.coeffs):
            out = out * x + c
        return out


def poly(coeffs, normalize=False):
    return GraphFilter("poly", coeffs=tuple(coeffs), normalize=normalize)


def _sqrt_abs(lam, lambda1):
    return np.sqrt(np.abs(lam))


def _identity(lam, lambda1):
    return np.ones_like(lam)


def _heat(t):
    def response(lam, lambda1):
        return np.exp(t * lam / lambda1)
    return response


def spectral(name):
    """Named spectral response: ``sqrt_abs``, ``identity`` or ``heat:{t}``."""
    if name == "sqrt_abs":
        return GraphFilter("spectral", response=_sqrt_abs, name=name)
    if name == "identity":
        return GraphFilter("spectral", response=_identity, name=name)
    if name.startswith("heat:"):
        try:
            t = float(name.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad heat filter parameter in {name!r}") from None
        return GraphFilter("spectral", response=_heat(t), name=f"heat:{t!r}")
    raise ConfigError(f"unknown spectral filter {name!r}")


def filter_from_spec(spec):
    """Build a filter from its JSON form (a dict, or a bare registry name)."""
    if isinstance(spec, str):
        return spectral(spec)
    kind = spec.get("type")
    if kind == "poly":
        return poly(spec["coeffs"], normalize=bool(spec.get("normalize", False)))
    if kind == "spectral":
        return spectral(spec["name"])
    raise ConfigError(f"unknown filter spec {spec!r}")


def filter_to_spec(f):
    if f.kind == "spectral":
        return {"type": "spectral", "name": f.name}
    out = {"type": "poly", "coeffs": list(f.coeffs)}
    if f.normalize:
        out["normalize"] = True
    return out


def _lambda1(g):
    return full_spectrum(g).eigenvalues[0]


def filter_matrix(f, g):
    """Dense ``H(A)``."""
    return apply_filter(f, g, np.eye(g.n))


def apply_filter(f, g, x):
    """``H(A) x`` for a length-n signal, or for each row of an (m, n) batch."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != g.n or x.ndim > 2:
        raise DataError(f"signal of shape {x.shape} does not match a graph on {g.n} nodes")
    # rows are signals; A is symmetric so (A x^T)^T == x A
    a = g.adjacency
    if f.kind == "poly":
        if f.normalize:
            a = a / _lambda1(g)
        y = f.coeffs[-1] * x
        for c in reversed(f.coeffs[:-1]):
            y = y @ a + c * x
        return y
    spec = full_spectrum(g)
    h = f.scalar(spec.eigenvalues, spec.eigenvalues[0])
    v = spec.eigenvectors
    return ((x @ v) * h) @ v.T


@dataclass(frozen=True)
class PopulationCovariance:
    matrix: np.ndarray
    eigengap: float
    degenerate: bool


def population_covariance(f, g):
    """``[H(A)]^2`` together with its top eigengap."""
    spec = full_spectrum(g)
    lam1 = spec.eigenvalues[0]
    if f.kind == "poly":
        h = filter_matrix(f, g)
        c = h @ h
    else:
        hl = f.scalar(spec.eigenvalues, lam1)
        v = spec.eigenvectors
        c = (v * hl**2) @ v.T
    c = (c + c.T) / 2.0
    ev = np.linalg.eigvalsh(c)[::-1]
    gap = float(ev[0] - ev[1]) if g.n > 1 else math.inf
    degenerate = gap < DEGENERATE_GAP * max(1.0, ev[0])
    return PopulationCovariance(c, gap, bool(degenerate))


def satisfies_assumption1(f, g):
    """Whether the top eigenvector of ``C_y`` is the centrality vector.

    Polynomials must have non-negative coefficients; spectral responses must be
    non-negative on the spectrum. Either way ``H(lambda_1)**2`` has to strictly
    dominate every other squared response, which is checked on the realized
    spectrum rather than trusted from the form (bipartite graphs break it).
    """
    if f.kind == "poly" and not f.nonnegative_coeffs:
        return False
    lam = full_spectrum(g).eigenvalues
    h = f.scalar(lam, lam[0])
    if f.kind == "spectral" and (h < 0).any():
        return False
    if h[0] <= 0:
        return False
    if g.n == 1:
        return True
    h2 = h**2
    return bool(h2[0] - h2[1:].max() > DEGENERATE_GAP * max(1.0, h2[0]))


def leading_matches_centrality(f, g):
    """True iff ``C_y`` has a simple top eigenvalue whose eigenvector is the centrality."""
    u = exact_centrality(g)
    pc = population_covariance(f, g)
    if pc.degenerate:
        return False
    _, v = np.linalg.eigh(pc.matrix)
    return bool(abs(v[:, -1] @ u) > 1.0 - 1e-8)
