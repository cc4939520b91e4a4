"""Backend selection for the hot pairwise kernels.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``BLINDRANK_PURE_PYTHON=1`` to force the fallback.
"""
import os
from types import SimpleNamespace

from . import _fallback

_NAMES = ("pair_codes", "concordance_counts", "min_viable_threshold", "tau_sweep", "jacobi_eigh")


def _load_ext():
    if os.environ.get("BLINDRANK_PURE_PYTHON"):
        return None
    try:
        from . import _ext
    except ImportError:
        return None
    return _ext


_ext = _load_ext()

BACKENDS = {"python": SimpleNamespace(**{k: getattr(_fallback, k) for k in _NAMES})}
if _ext is not None:
    BACKENDS["compiled"] = SimpleNamespace(**{k: getattr(_ext, k) for k in _NAMES})

BACKEND = "compiled" if _ext is not None else "python"


def get_backend(name=None):
    """Return the kernel namespace for ``name`` (default: the active backend)."""
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None


_active = BACKENDS[BACKEND]
pair_codes = _active.pair_codes
concordance_counts = _active.concordance_counts
min_viable_threshold = _active.min_viable_threshold
tau_sweep = _active.tau_sweep
jacobi_eigh = _active.jacobi_eigh
