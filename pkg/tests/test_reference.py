"""Exact matching oracle, greedy baseline and beta-fraction measurement."""

import itertools

import numpy as np
import pytest

from bubblecode.bc import decode_side
from bubblecode.lattice import Side, SurfaceCode, Syndrome
from bubblecode.reference import (
    BOUNDARY,
    CapacityError,
    MatchOracleProblem,
    beta_fraction,
    decoder_corrects,
    exact_min_matching,
    greedy_decode,
    mwpm_decode,
    oracle_problem,
    wilson_interval,
)


def enumerate_min_cost(pair_cost, boundary_cost):
    """Independent oracle: recursively enumerate every way to pair defects or
    send them to a boundary, without memoization or pruning."""
    n = len(boundary_cost)

    def rec(alive):
        if not alive:
            return 0
        i = alive[0]
        rest = alive[1:]
        best = boundary_cost[i] + rec(rest)
        for k, j in enumerate(rest):
            cost = pair_cost[i][j] + rec(rest[:k] + rest[k + 1 :])
            best = min(best, cost)
        return best

    return rec(tuple(range(n)))


class TestExactMinMatching:
    def test_pair_beats_boundaries(self):
        problem = MatchOracleProblem((0, 1), ((0, 2), (2, 0)), (3, 3))
        partners, cost = exact_min_matching(problem)
        assert partners == (1, 0)
        assert cost == 2

    def test_single_defect_goes_to_boundary(self):
        problem = MatchOracleProblem((5,), ((0,),), (4,))
        partners, cost = exact_min_matching(problem)
        assert partners == (BOUNDARY,)
        assert cost == 4

    def test_empty(self):
        assert exact_min_matching(MatchOracleProblem((), (), ())) == ((), 0)

    def test_capacity_error(self):
        n = 17
        problem = MatchOracleProblem(
            tuple(range(n)),
            tuple(tuple(1 for _ in range(n)) for _ in range(n)),
            tuple(1 for _ in range(n)),
        )
        with pytest.raises(CapacityError):
            exact_min_matching(problem)

    def test_four_defect_line_matches_enumerator(self):
        code = SurfaceCode(5)
        defects = tuple(code.defect_index(2, c) for c in range(4))
        problem = oracle_problem(code, defects)
        _, cost = exact_min_matching(problem)
        assert cost == enumerate_min_cost(problem.pair_cost, problem.boundary_cost)

    def test_matches_enumerator_on_random_instances(self):
        rng = np.random.default_rng(2024)
        for _ in range(10_000):
            n = int(rng.integers(1, 9))
            pair = rng.integers(1, 12, size=(n, n))
            pair = (pair + pair.T).tolist()
            for i in range(n):
                pair[i][i] = 0
            bc = rng.integers(1, 12, size=n).tolist()
            problem = MatchOracleProblem(
                tuple(range(n)), tuple(map(tuple, pair)), tuple(bc)
            )
            partners, cost = exact_min_matching(problem)
            assert cost == enumerate_min_cost(problem.pair_cost, problem.boundary_cost)
            # the returned pairing realizes the returned cost
            realized = 0
            for i, j in enumerate(partners):
                if j == BOUNDARY:
                    realized += bc[i]
                elif j > i:
                    realized += pair[i][j]
                else:
                    assert partners[j] == i
            assert realized == cost


class TestMwpmDecode:
    def test_clears_every_syndrome(self):
        code = SurfaceCode(5)
        rng = np.random.default_rng(7)
        for _ in range(200):
            defects = tuple(
                sorted(
                    rng.choice(
                        code.num_defect_sites, size=int(rng.integers(0, 9)), replace=False
                    ).tolist()
                )
            )
            for side in Side:
                corr = mwpm_decode(code, Syndrome(defects, side))
                assert code.syndrome_of(corr, side).defects == defects

    def test_corrects_all_weight_up_to_t_exhaustive(self):
        for d in (3, 5):
            code = SurfaceCode(d)
            for w in range(1, code.t + 1):
                for error in itertools.combinations(range(code.n), w):
                    assert decoder_corrects(code, mwpm_decode, error)


class TestGreedyDecode:
    def test_trivial_cases(self):
        code = SurfaceCode(5)
        assert greedy_decode(code, Syndrome((), Side.PRIMAL)) == frozenset()
        defects = (code.defect_index(1, 1), code.defect_index(1, 2))
        corr = greedy_decode(code, defects)
        assert corr == code.path_qubits(*defects)

    def test_clears_every_syndrome(self):
        code = SurfaceCode(7)
        rng = np.random.default_rng(9)
        for _ in range(200):
            defects = tuple(
                sorted(
                    rng.choice(
                        code.num_defect_sites, size=int(rng.integers(0, 12)), replace=False
                    ).tolist()
                )
            )
            for side in Side:
                corr = greedy_decode(code, Syndrome(defects, side))
                assert code.syndrome_of(corr, side).defects == defects

    def test_fails_on_the_spread_weight4_pattern(self):
        code = SurfaceCode(7)
        error = frozenset({18, 36, 41, 63})
        assert not decoder_corrects(code, greedy_decode, error)
        assert decoder_corrects(code, decode_side, error)


class TestBetaFraction:
    def test_weight_t_is_one_for_distance_preserving_decoders(self):
        code = SurfaceCode(3)
        for decoder in (decode_side, mwpm_decode):
            result = beta_fraction(code, decoder, w=code.t)
            assert result.exhaustive
            assert result.patterns == 13
            assert result.failures == 0
            assert result.beta == 1.0

    def test_sampled_mode(self):
        code = SurfaceCode(5)
        result = beta_fraction(code, decode_side, w=2, sample_budget=300, seed=3)
        assert not result.exhaustive
        assert result.patterns == 300
        assert result.failures == 0
        lo, hi = result.interval
        assert lo <= result.beta <= hi

    def test_rejects_bad_weight(self):
        code = SurfaceCode(3)
        with pytest.raises(ValueError):
            beta_fraction(code, decode_side, w=0)

    def test_exhaustive_budget_guard(self):
        code = SurfaceCode(11)
        with pytest.raises(CapacityError):
            beta_fraction(code, decode_side, w=6)


class TestVerificationSuites:
    def test_distance_preservation_exhaustive_d3(self):
        from bubblecode.reference import distance_preservation_exhaustive

        code = SurfaceCode(3)
        for side in Side:
            result = distance_preservation_exhaustive(code, decode_side, 1, side)
            assert result.patterns == 13
            assert result.passed
            assert result.line().startswith("PASS distance-preservation-exhaustive d=3")

    def test_distance_preservation_randomized_is_seeded(self):
        from bubblecode.reference import distance_preservation_randomized

        code = SurfaceCode(5)
        a = distance_preservation_randomized(code, decode_side, 2, patterns=200, seed=3)
        b = distance_preservation_randomized(code, decode_side, 2, patterns=200, seed=3)
        assert a == b
        assert a.passed

    def test_corollary1_small(self):
        from bubblecode.reference import multi_cluster_suite

        code = SurfaceCode(5)
        for ell in (1, 2):
            result = multi_cluster_suite(code, ell, patterns=150, seed=5)
            assert result.patterns == 150
            assert result.passed

    def test_suite_failure_line(self):
        from bubblecode.reference import SuiteResult

        bad = SuiteResult("demo", 10, 2)
        assert not bad.passed
        assert bad.line() == "FAIL demo: 8/10 corrected"


def test_wilson_interval_brackets_the_estimate():
    lo, hi = wilson_interval(90, 100)
    assert lo < 0.9 < hi
    assert wilson_interval(0, 0) == (0.0, 1.0)
    lo, hi = wilson_interval(0, 50)
    assert lo == 0.0 and hi > 0.0
    lo, hi = wilson_interval(50, 50)
    assert hi == 1.0 and lo < 1.0
