"""Ghost insertion, path building and tree peeling."""

import pytest
from hypothesis import given, settings, strategies as st

from bubblecode.bc import (
    BcConfig,
    add_ghost,
    bubble_cluster,
    bubble_radius,
    build_match,
    peel,
)
from bubblecode.lattice import LEFT, RIGHT, Side, SurfaceCode


def cluster_state(code, defects, radius=None, star=True):
    if radius is None:
        radius = bubble_radius(code.t, len(defects))
    return bubble_cluster(
        code, tuple(sorted(defects)), radius, BcConfig(enable_star_avoidance=star)
    )


class TestAddGhost:
    def test_even_cluster_gets_no_first_ghost(self):
        code = SurfaceCode(7)
        state = cluster_state(code, [code.defect_index(0, 0), code.defect_index(0, 1)])
        assert add_ghost(code, state, 1, phase=1) == []

    def test_odd_cluster_unique_nearest(self):
        code = SurfaceCode(7)
        state = cluster_state(code, [code.defect_index(5, 1)])
        assert add_ghost(code, state, 1, phase=1) == [(0, LEFT)]

    def test_first_phase_tie_prefers_farthest_from_cluster(self):
        # (0,1) and (1,4) are both 2 from their nearest boundary; (1,4) is
        # farther from the rest of the cluster, so it takes the ghost
        code = SurfaceCode(7)
        defects = (
            code.defect_index(0, 1),
            code.defect_index(0, 2),
            code.defect_index(1, 4),
        )
        state = cluster_state(code, defects, radius=3)
        assert state.num_clusters == 1
        assert add_ghost(code, state, 1, phase=1) == [(2, RIGHT)]

    def test_remaining_tie_takes_scan_order(self):
        # all boundary distances and nearest-neighbor distances equal:
        # lowest site index wins
        code = SurfaceCode(5)
        defects = (
            code.defect_index(0, 0),
            code.defect_index(2, 0),
            code.defect_index(4, 0),
        )
        state = cluster_state(code, defects, radius=2)
        assert state.num_clusters == 1
        assert add_ghost(code, state, 1, phase=1) == [(0, LEFT)]

    def test_second_phase_odd_uses_opposite_boundary(self):
        code = SurfaceCode(7)
        state = cluster_state(code, [code.defect_index(3, 2)])
        assert add_ghost(code, state, 1, phase=2, prev_side=LEFT) == [(0, RIGHT)]
        assert add_ghost(code, state, 1, phase=2, prev_side=RIGHT) == [(0, LEFT)]

    def test_second_phase_odd_requires_prev_side(self):
        code = SurfaceCode(7)
        state = cluster_state(code, [code.defect_index(3, 2)])
        with pytest.raises(ValueError):
            add_ghost(code, state, 1, phase=2)

    def test_second_phase_even_attaches_both_boundaries(self):
        code = SurfaceCode(7)
        defects = (code.defect_index(0, 1), code.defect_index(0, 4))
        state = cluster_state(code, defects, radius=4)
        assert state.num_clusters == 1
        got = add_ghost(code, state, 1, phase=2)
        assert got == [(0, LEFT), (1, RIGHT)]

    def test_rejects_bad_phase(self):
        code = SurfaceCode(7)
        state = cluster_state(code, [0])
        with pytest.raises(ValueError):
            add_ghost(code, state, 1, phase=3)


class TestBuildMatch:
    def test_identity_is_empty(self):
        code = SurfaceCode(5)
        assert build_match(code, 7, 7) == frozenset()

    def test_same_row_neighbors(self):
        code = SurfaceCode(5)
        s_i = code.defect_index(1, 1)
        s_j = code.defect_index(1, 2)
        assert build_match(code, s_i, s_j) == frozenset({code.horizontal_qubit(1, 2)})

    def test_l_shaped_path(self):
        code = SurfaceCode(5)
        s_i = code.defect_index(0, 0)
        s_j = code.defect_index(2, 2)
        path = build_match(code, s_i, s_j)
        assert len(path) == code.eval_d(s_i, s_j) == 4
        vertical = {q for q in path if not code.is_horizontal(q)}
        assert len(vertical) == 2
        # vertical leg runs along the start column, horizontal leg along the
        # end row
        assert vertical == {code.vertical_qubit(0, 0), code.vertical_qubit(1, 0)}
        assert path - vertical == {
            code.horizontal_qubit(2, 1),
            code.horizontal_qubit(2, 2),
        }

    def test_boundary_variant(self):
        code = SurfaceCode(7)
        s = code.defect_index(4, 2)
        assert build_match(code, s, boundary=LEFT) == frozenset(
            {code.horizontal_qubit(4, h) for h in range(3)}
        )
        assert len(build_match(code, s, boundary=RIGHT)) == code.boundary_distance(
            s, RIGHT
        )

    def test_requires_exactly_one_target(self):
        code = SurfaceCode(5)
        with pytest.raises(ValueError):
            build_match(code, 0)
        with pytest.raises(ValueError):
            build_match(code, 0, 1, boundary=LEFT)

    @settings(max_examples=80, deadline=None)
    @given(st.data())
    def test_path_size_equals_eval_d_both_sides(self, data):
        d = data.draw(st.sampled_from([3, 5, 7]))
        code = SurfaceCode(d)
        side = data.draw(st.sampled_from(list(Side)))
        s_i = data.draw(st.integers(0, code.num_defect_sites - 1))
        s_j = data.draw(st.integers(0, code.num_defect_sites - 1))
        path = build_match(code, s_i, s_j, side=side)
        assert len(path) == code.eval_d(s_i, s_j)


class TestPeel:
    def test_two_defect_cluster_single_edge(self):
        code = SurfaceCode(7)
        defects = (code.defect_index(2, 2), code.defect_index(2, 4))
        state = cluster_state(code, defects, radius=4)
        m = peel(code, state, 1)
        assert m.qubit_set == build_match(code, *defects)
        assert m.weight == 2
        assert m.ghost_side == "none"

    def test_singleton_with_ghost_is_boundary_path(self):
        code = SurfaceCode(7)
        s = code.defect_index(5, 1)
        state = cluster_state(code, [s])
        ghosts = add_ghost(code, state, 1, phase=1)
        m = peel(code, state, 1, ghosts)
        assert m.qubit_set == code.boundary_path_qubits(s, LEFT)
        assert m.weight == code.boundary_distance(s, "nearest") == 2
        assert m.ghost_side == LEFT

    def test_odd_cluster_without_ghost_is_a_contract_violation(self):
        code = SurfaceCode(7)
        state = cluster_state(code, [code.defect_index(3, 3)])
        with pytest.raises(ValueError):
            peel(code, state, 1)

    def test_four_error_two_cluster_pattern(self):
        # four errors, three defects, two clusters, one ghost: both final
        # matchings equal the generating error pieces (derived by hand)
        code = SurfaceCode(7)
        error = frozenset({9, 10, 35, 36})  # (1,2)h (1,3)h (5,0)h (5,1)h
        syn = code.syndrome_of(error, Side.PRIMAL)
        assert syn.defects == (7, 9, 31)
        radius = bubble_radius(code.t, 3)
        assert radius == 3
        state = bubble_cluster(code, syn, radius)
        assert state.num_clusters == 2
        assert state.cluster_lists == [[0, 1], [2]]
        # even cluster: no ghost, path between the defect pair
        assert add_ghost(code, state, 1, phase=1) == []
        m1 = peel(code, state, 1)
        assert m1.qubit_set == frozenset({9, 10})
        # odd cluster: left ghost, straight boundary path
        ghosts = add_ghost(code, state, 2, phase=1)
        assert ghosts == [(2, LEFT)]
        m2 = peel(code, state, 2, ghosts)
        assert m2.qubit_set == frozenset({35, 36})

    @settings(max_examples=100, deadline=None)
    @given(st.data())
    def test_matching_invariants(self, data):
        """Weight = |qubit_set|, stored column parity is consistent, and the
        matching's syndrome is exactly the cluster's defects."""
        d = data.draw(st.sampled_from([3, 5, 7]))
        code = SurfaceCode(d)
        side = data.draw(st.sampled_from(list(Side)))
        defects = tuple(
            sorted(
                data.draw(
                    st.sets(
                        st.integers(0, code.num_defect_sites - 1),
                        min_size=1,
                        max_size=10,
                    )
                )
            )
        )
        star = data.draw(st.booleans())
        radius = bubble_radius(code.t, len(defects))
        state = bubble_cluster(
            code, defects, radius, BcConfig(enable_star_avoidance=star)
        )
        for k in range(1, state.num_clusters + 1):
            ghosts = add_ghost(code, state, k, phase=1)
            m = peel(code, state, k, ghosts, side)
            assert m.weight == len(m.qubit_set)
            recomputed = [0] * code.d
            for q in m.qubit_set:
                col = code.grid_column_of(side, q)
                if col is not None:
                    recomputed[col - 1] ^= 1
            assert tuple(recomputed) == m.column_parity
            cleared = code.syndrome_of(m.qubit_set, side)
            assert set(cleared.defects) == set(state.cluster_sites(k))
