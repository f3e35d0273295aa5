"""Bubble-clustering decoder for planar surface codes.

Library layout: :mod:`bubblecode.lattice` (geometry), :mod:`bubblecode.noise`
(depolarizing channel), :mod:`bubblecode.bc` (the decoder, reference
implementation), :mod:`bubblecode._kernels` (compiled engine),
:mod:`bubblecode.reference` (exact matching oracle, greedy baseline and
verification suites) and :mod:`bubblecode.harness` (Monte Carlo and timing).
"""

from ._kernels import BubbleDecoder
from .bc import (
    BcConfig,
    ClusterState,
    Matching,
    add_ghost,
    bubble_cluster,
    bubble_radius,
    build_match,
    decode_side,
    decode_side_detailed,
    high_distance_merge,
    peel,
    post_process,
)
from .harness import ExperimentSpec, ResultRow, TimingRow
from .lattice import Side, SurfaceCode, Syndrome
from .noise import DepolarizingChannel, PauliError, split_sides
from .reference import (
    BetaResult,
    CapacityError,
    MatchOracleProblem,
    beta_fraction,
    exact_min_matching,
    greedy_decode,
    mwpm_decode,
)

__version__ = "0.1.0"

__all__ = [
    "BcConfig",
    "BetaResult",
    "BubbleDecoder",
    "CapacityError",
    "ClusterState",
    "DepolarizingChannel",
    "ExperimentSpec",
    "MatchOracleProblem",
    "Matching",
    "PauliError",
    "ResultRow",
    "Side",
    "SurfaceCode",
    "Syndrome",
    "TimingRow",
    "add_ghost",
    "beta_fraction",
    "bubble_cluster",
    "bubble_radius",
    "build_match",
    "decode_side",
    "decode_side_detailed",
    "exact_min_matching",
    "greedy_decode",
    "high_distance_merge",
    "mwpm_decode",
    "peel",
    "post_process",
    "split_sides",
]
