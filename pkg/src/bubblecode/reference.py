"""Reference decoders and verification helpers.

``exact_min_matching`` is a ground-truth minimum-weight matcher (exhaustive
bitmask DP, exact at small defect counts), ``greedy_decode`` is a
nearest-pair-first baseline, and ``beta_fraction`` measures the fraction of
fixed-weight error patterns a decoder corrects.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .lattice import NEAREST, Side, SurfaceCode, Syndrome

ORACLE_MAX_DEFECTS = 16
EXHAUSTIVE_PATTERN_BUDGET = 10_000_000

BOUNDARY = -1  # partner sentinel in oracle pairings


class CapacityError(ValueError):
    """An exact-search budget was exceeded."""


@dataclass(frozen=True)
class MatchOracleProblem:
    """Pairwise and boundary costs for an exact matching instance."""

    defects: tuple[int, ...]
    pair_cost: tuple[tuple[int, ...], ...]
    boundary_cost: tuple[int, ...]


def oracle_problem(code: SurfaceCode, syndrome: Union[Syndrome, Sequence[int]]) -> MatchOracleProblem:
    defects = syndrome.defects if isinstance(syndrome, Syndrome) else tuple(sorted(syndrome))
    pair = tuple(
        tuple(code.eval_d(a, b) for b in defects) for a in defects
    )
    boundary = tuple(code.boundary_distance(s, NEAREST) for s in defects)
    return MatchOracleProblem(defects, pair, boundary)


def exact_min_matching(problem: MatchOracleProblem) -> tuple[tuple[int, ...], int]:
    """Minimum-cost pairing of defects, each either paired or sent to a boundary.

    Ghost defects pair among themselves at zero cost, so boundary use carries
    no parity constraint.  Returns (partners, cost) with ``partners[i]`` the
    partner index or BOUNDARY (-1); ties break lexicographically with
    boundary sorting after any defect partner.
    """
    n = len(problem.defects)
    if n > ORACLE_MAX_DEFECTS:
        raise CapacityError(
            f"exact matching supports up to {ORACLE_MAX_DEFECTS} defects, got {n}"
        )
    if n == 0:
        return (), 0
    pair = problem.pair_cost
    bc = problem.boundary_cost
    best_cost: dict[int, int] = {0: 0}
    # choice[mask] = partner chosen for the lowest set bit (n means boundary)
    choice: dict[int, int] = {}

    def solve(mask: int) -> int:
        cached = best_cost.get(mask)
        if cached is not None:
            return cached
        i = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << i)
        best = None
        pick = None
        for j in range(i + 1, n):
            if rest & (1 << j):
                cost = pair[i][j] + solve(rest ^ (1 << j))
                if best is None or cost < best:
                    best, pick = cost, j
        cost = bc[i] + solve(rest)
        if best is None or cost < best:
            best, pick = cost, n
        best_cost[mask] = best
        choice[mask] = pick
        return best

    full = (1 << n) - 1
    total = solve(full)
    partners = [BOUNDARY] * n
    mask = full
    while mask:
        i = (mask & -mask).bit_length() - 1
        j = choice[mask]
        mask ^= 1 << i
        if j < n:
            partners[i] = j
            partners[j] = i
            mask ^= 1 << j
    return tuple(partners), total


def mwpm_decode(
    code: SurfaceCode,
    syndrome: Union[Syndrome, Sequence[int]],
    side: Optional[Side] = None,
) -> frozenset[int]:
    """Decode via the exact matching oracle, mapping pairs to lattice paths."""
    if side is None:
        side = syndrome.side if isinstance(syndrome, Syndrome) else Side.PRIMAL
    problem = oracle_problem(code, syndrome)
    partners, _ = exact_min_matching(problem)
    correction: set[int] = set()
    for i, j in enumerate(partners):
        s_i = problem.defects[i]
        if j == BOUNDARY:
            _, which = code.nearest_boundary(s_i)
            correction ^= code.boundary_path_qubits(s_i, which, side)
        elif j > i:
            correction ^= code.path_qubits(s_i, problem.defects[j], side)
    return frozenset(correction)


def greedy_decode(
    code: SurfaceCode,
    syndrome: Union[Syndrome, Sequence[int]],
    side: Optional[Side] = None,
) -> frozenset[int]:
    """Nearest-pair-first baseline.

    Repeatedly commits the globally cheapest remaining move, a defect pair at
    eval_d cost or a defect's nearest boundary, removing matched defects.
    Ties break on (cost, first index, second index) with boundary moves
    sorting after pair moves of the same first index.
    """
    if side is None:
        side = syndrome.side if isinstance(syndrome, Syndrome) else Side.PRIMAL
    defects = list(
        syndrome.defects if isinstance(syndrome, Syndrome) else sorted(syndrome)
    )
    n = len(defects)
    alive = set(range(n))
    correction: set[int] = set()
    while alive:
        best = None
        for i in sorted(alive):
            for j in sorted(alive):
                if j <= i:
                    continue
                key = (code.eval_d(defects[i], defects[j]), i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
            key = (code.boundary_distance(defects[i], NEAREST), i, n)
            if best is None or key < best[0]:
                best = (key, i, BOUNDARY)
        _, i, j = best
        if j == BOUNDARY:
            _, which = code.nearest_boundary(defects[i])
            correction ^= code.boundary_path_qubits(defects[i], which, side)
            alive.remove(i)
        else:
            correction ^= code.path_qubits(defects[i], defects[j], side)
            alive.remove(i)
            alive.remove(j)
    return frozenset(correction)


Decoder = Callable[[SurfaceCode, Syndrome], frozenset]


@dataclass(frozen=True)
class BetaResult:
    """Corrected fraction of fixed-weight error patterns, with a Wilson CI."""

    weight: int
    patterns: int
    failures: int
    exhaustive: bool

    @property
    def beta(self) -> float:
        return 1.0 - self.failures / self.patterns

    @property
    def interval(self) -> tuple[float, float]:
        return wilson_interval(self.patterns - self.failures, self.patterns)


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    # clamp so floating point cannot push the bounds past [0,1] or the estimate
    return (max(0.0, min(center - half, phat)), min(1.0, max(center + half, phat)))


def decoder_corrects(
    code: SurfaceCode, decoder: Decoder, error: Iterable[int], side: Side = Side.PRIMAL
) -> bool:
    """True iff decoding the error's syndrome leaves a non-logical residual."""
    error = frozenset(error)
    syndrome = code.syndrome_of(error, side)
    correction = decoder(code, syndrome)
    return not code.is_logical_failure(error ^ correction, side)


@dataclass(frozen=True)
class SuiteResult:
    """Outcome of one verification suite."""

    name: str
    patterns: int
    failures: int

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        corrected = self.patterns - self.failures
        return f"{status} {self.name}: {corrected}/{self.patterns} corrected"


def distance_preservation_exhaustive(
    code: SurfaceCode, decoder: Decoder, max_weight: int, side: Side = Side.PRIMAL
) -> SuiteResult:
    """Check every single-type error pattern of weight 1..max_weight."""
    patterns = 0
    failures = 0
    for w in range(1, max_weight + 1):
        for error in itertools.combinations(range(code.n), w):
            patterns += 1
            if not decoder_corrects(code, decoder, error, side):
                failures += 1
    name = f"distance-preservation-exhaustive d={code.d} side={side.value} w<={max_weight}"
    return SuiteResult(name, patterns, failures)


def distance_preservation_randomized(
    code: SurfaceCode,
    decoder: Decoder,
    max_weight: int,
    patterns: int,
    side: Side = Side.PRIMAL,
    seed: int = 0,
) -> SuiteResult:
    """Check random error patterns of uniformly drawn weight 1..max_weight."""
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 1], dtype=np.uint64)))
    failures = 0
    for _ in range(patterns):
        w = int(rng.integers(1, max_weight + 1))
        error = rng.choice(code.n, size=w, replace=False).tolist()
        if not decoder_corrects(code, decoder, error, side):
            failures += 1
    name = f"distance-preservation-random d={code.d} side={side.value} w<={max_weight} n={patterns}"
    return SuiteResult(name, patterns, failures)


def multi_cluster_suite(
    code: SurfaceCode,
    ell: int,
    patterns: int,
    side: Side = Side.PRIMAL,
    seed: int = 0,
    config=None,
    decoder: Optional[Decoder] = None,
) -> SuiteResult:
    """Check weight-(t+ell-1) patterns whose clustering yields >= ell clusters.

    Patterns that cluster into fewer groups are re-drawn; the suite counts
    only accepted patterns.  ``decoder`` defaults to the reference bubble
    decoder with the given config.
    """
    # imported here: this suite is specifically about the bubble decoder,
    # and the bc module is a consumer of everything else in this file
    from .bc import BcConfig, bubble_cluster, bubble_radius, decode_side

    if config is None:
        config = BcConfig()
    if decoder is None:
        decoder = lambda c, s: decode_side(c, s, config)
    if ell < 1:
        raise ValueError("ell must be >= 1")
    w = code.t + ell - 1
    rng = np.random.Generator(
        np.random.Philox(key=np.array([seed, 100 + ell], dtype=np.uint64))
    )
    failures = 0
    accepted = 0
    attempts = 0
    max_attempts = 200 * patterns
    while accepted < patterns:
        attempts += 1
        if attempts > max_attempts:
            raise CapacityError(
                f"could not construct {patterns} patterns with >= {ell} clusters"
            )
        error = frozenset(rng.choice(code.n, size=w, replace=False).tolist())
        syndrome = code.syndrome_of(error, side)
        if not syndrome.defects:
            continue
        radius = bubble_radius(
            code.t, len(syndrome.defects), config.enable_radius_adjustment
        )
        state = bubble_cluster(code, syndrome, radius, config)
        if state.num_clusters < ell:
            continue
        accepted += 1
        correction = decoder(code, syndrome)
        if code.is_logical_failure(error ^ correction, side):
            failures += 1
    name = f"multi-cluster d={code.d} ell={ell} w={w} n={patterns}"
    return SuiteResult(name, patterns, failures)


def beta_fraction(
    code: SurfaceCode,
    decoder: Decoder,
    w: int,
    sample_budget: Union[int, str] = "exhaustive",
    side: Side = Side.PRIMAL,
    seed: int = 0,
) -> BetaResult:
    """Fraction of weight-w single-type error patterns the decoder corrects.

    ``sample_budget`` is "exhaustive" to enumerate all C(n, w) patterns
    (capacity-limited) or an integer number of uniform random patterns.
    """
    if w < 1:
        raise ValueError(f"pattern weight must be >= 1, got {w}")
    failures = 0
    if sample_budget == "exhaustive":
        total = math.comb(code.n, w)
        if total > EXHAUSTIVE_PATTERN_BUDGET:
            raise CapacityError(
                f"C({code.n},{w}) = {total} exceeds the exhaustive budget"
            )
        for error in itertools.combinations(range(code.n), w):
            if not decoder_corrects(code, decoder, error, side):
                failures += 1
        return BetaResult(w, total, failures, exhaustive=True)
    patterns = int(sample_budget)
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))
    for _ in range(patterns):
        error = rng.choice(code.n, size=w, replace=False)
        if not decoder_corrects(code, decoder, error.tolist(), side):
            failures += 1
    return BetaResult(w, patterns, failures, exhaustive=False)
