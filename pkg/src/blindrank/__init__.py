"""Rank the nodes of an unobserved graph by eigenvector centrality from graph signals."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BlindRankError,
    ConfigError,
    ConvergenceError,
    DataError,
    DegenerateSpectrumError,
    DisconnectedGraphError,
    NumericalError,
    UndefinedBoundError,
)
from .graphs import (  # noqa: E402
    Graph,
    exact_centrality,
    full_spectrum,
    gen_erdos_renyi,
    gen_mixed_crgm,
    gen_named,
    is_connected,
)
from .filters import apply_filter, population_covariance, poly, spectral  # noqa: E402
from .signals import SignalBatch, draw_noise, sample_covariance, synthesize_batch  # noqa: E402
from .spectral import alignment, estimate_centrality, leading_eigenvector, sign_correct  # noqa: E402
from .ranking import (  # noqa: E402
    NodeOrdering,
    concordance,
    min_viable_threshold,
    rank_simple,
    rank_threshold,
    weak_order_from_vector,
)
