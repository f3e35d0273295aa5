"""Bubble-clustering decoder for one side of a planar surface code.

Decoding runs in four phases: pick a bubble radius from the defect count,
grow clusters as trees by sweeping each cluster member's bubble, peel each
tree into a matching (inserting boundary ghosts to fix parity), and pick
between the first matching and a logically-complementary second one using
weight rules and, as a last resort, a column-parity metric.

All functions here are the readable reference implementation; the numba
kernels in :mod:`bubblecode._kernels` implement the identical algorithm for
the hot path and are differentially tested against this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .lattice import LEFT, RIGHT, Side, SurfaceCode, Syndrome

NONE = "none"
BOTH = "both"


@dataclass(frozen=True)
class BcConfig:
    """Feature toggles for the decoder adjustments (all on by default)."""

    enable_radius_adjustment: bool = True
    enable_star_avoidance: bool = True
    enable_high_distance_rules: bool = True  # takes effect at d >= 11


@dataclass
class ClusterState:
    """Forest over the syndrome's defects produced by the clustering phase.

    Defects are referred to by position in ``defects`` (0-based); cluster
    indices are 1-based with membership 0 meaning unassigned, matching the
    clustering algorithm's bookkeeping vectors.
    """

    defects: tuple[int, ...]
    membership: list[int]
    parent: list[int]  # tree parent position, -1 for cluster roots
    nearest_edge_len: list[int]  # distance to parent, 0 for roots
    adjacency: list[set[int]]
    order: list[int]
    cluster_lists: list[list[int]]  # insertion-ordered positions, index = cluster-1
    cardinality: list[int]
    num_clusters: int

    def cluster_sites(self, cluster: int) -> list[int]:
        """Defect site indices of a cluster (1-based), in insertion order."""
        return [self.defects[v] for v in self.cluster_lists[cluster - 1]]

    def edges(self) -> set[frozenset[int]]:
        """All tree edges as position pairs."""
        out = set()
        for v, nbrs in enumerate(self.adjacency):
            for w in nbrs:
                out.add(frozenset((v, w)))
        return out


@dataclass(frozen=True)
class Matching:
    """A candidate correction for one cluster."""

    qubit_set: frozenset[int]
    weight: int
    column_parity: tuple[int, ...]  # length d, per-side column intersections mod 2
    ghost_side: str  # "none", "left", "right" or "both"

    @property
    def column_metric(self) -> int:
        return sum(self.column_parity)


GhostAttachment = tuple[int, str]  # (defect position, boundary side)


def bubble_radius(t: int, n_d: int, adjusted: bool = True) -> int:
    """Bubble radius from the correction capability and the defect count.

    Base rule: R = t + 2 - ceil(n_d / 2).  Adjusted mode keeps that value for
    n_d <= 2t and returns 2 otherwise, so adjacent double errors still land in
    one cluster at high defect counts.  Unadjusted mode clamps at 1 to stay
    total.
    """
    if n_d < 1 or t < 1:
        raise ValueError(f"need n_d >= 1 and t >= 1, got n_d={n_d}, t={t}")
    base = t + 2 - (n_d + 1) // 2
    if adjusted:
        return base if n_d <= 2 * t else 2
    return max(1, base)


def _as_defects(syndrome: Union[Syndrome, Sequence[int]]) -> tuple[int, ...]:
    if isinstance(syndrome, Syndrome):
        return syndrome.defects
    return tuple(sorted(syndrome))


def bubble_cluster(
    code: SurfaceCode,
    syndrome: Union[Syndrome, Sequence[int]],
    radius: int,
    config: BcConfig = BcConfig(),
) -> ClusterState:
    """Group defects into cluster trees by sweeping bubbles of the given radius.

    Each cluster is seeded with the lowest-index unassigned defect; the sweep
    then walks the growing cluster list, attaching every unassigned defect
    within ``radius`` of the current member, so clusters are transitive
    closures under eval_d <= radius.  With star avoidance on, a sibling that
    is strictly closer to the member being processed than to their shared
    parent is re-parented under that member.
    """
    defects = _as_defects(syndrome)
    if not defects:
        raise ValueError("bubble_cluster requires a nonempty syndrome")
    if radius < 1:
        raise ValueError(f"radius must be >= 1, got {radius}")
    n_d = len(defects)
    membership = [0] * n_d
    parent = [-1] * n_d
    near_len = [0] * n_d
    adjacency: list[set[int]] = [set() for _ in range(n_d)]
    order = [0] * n_d
    cluster_lists: list[list[int]] = []
    total = 0
    while total < n_d:
        seed = membership.index(0)
        members = [seed]
        cluster_lists.append(members)
        nc = len(cluster_lists)
        membership[seed] = nc
        total += 1
        cursor = 0
        while cursor < len(members):
            u = members[cursor]
            for w in range(n_d):
                if w == u:
                    continue
                dist = code.eval_d(defects[u], defects[w])
                if dist > radius:
                    continue
                if membership[w] == 0:
                    membership[w] = nc
                    parent[w] = u
                    near_len[w] = dist
                    adjacency[u].add(w)
                    adjacency[w].add(u)
                    order[u] += 1
                    order[w] += 1
                    members.append(w)
                    total += 1
                elif (
                    config.enable_star_avoidance
                    and membership[w] == nc
                    and parent[w] != -1
                    and parent[w] == parent[u]
                    and dist < near_len[w]
                ):
                    old = parent[w]
                    adjacency[old].discard(w)
                    adjacency[w].discard(old)
                    order[old] -= 1
                    adjacency[u].add(w)
                    adjacency[w].add(u)
                    order[u] += 1
                    parent[w] = u
                    near_len[w] = dist
            cursor += 1
    return ClusterState(
        defects=defects,
        membership=membership,
        parent=parent,
        nearest_edge_len=near_len,
        adjacency=adjacency,
        order=order,
        cluster_lists=cluster_lists,
        cardinality=[len(m) for m in cluster_lists],
        num_clusters=len(cluster_lists),
    )


def _nearest_neighbor_dist(code: SurfaceCode, state: ClusterState, cluster: int, v: int) -> int:
    members = state.cluster_lists[cluster - 1]
    best = 0
    for w in members:
        if w != v:
            dist = code.eval_d(state.defects[v], state.defects[w])
            if best == 0 or dist < best:
                best = dist
    return best


def _pick_ghost_defect(
    code: SurfaceCode, state: ClusterState, cluster: int, which: str
) -> int:
    """Defect of a cluster closest to a boundary ("left", "right" or "nearest").

    Ties go to the defect farthest from the rest of its cluster (max distance
    to its nearest cluster neighbor), then to the first defect in
    left-to-right, top-to-bottom scan order (lowest site index).
    """
    members = state.cluster_lists[cluster - 1]
    return min(
        members,
        key=lambda v: (
            code.boundary_distance(state.defects[v], which),
            -_nearest_neighbor_dist(code, state, cluster, v),
            state.defects[v],
        ),
    )


def add_ghost(
    code: SurfaceCode,
    state: ClusterState,
    cluster: int,
    phase: int,
    prev_side: Optional[str] = None,
) -> list[GhostAttachment]:
    """Ghost-ancilla attachments for a cluster in the given peeling phase.

    Phase 1 attaches one ghost to odd clusters (on the nearest boundary of the
    chosen defect) and none to even ones.  Phase 2 attaches one ghost on the
    boundary opposite ``prev_side`` for odd clusters, and two ghosts (nearest
    defect to each boundary) for even ones, so the second matching differs
    from the first by a logical crossing.
    """
    if phase not in (1, 2):
        raise ValueError(f"phase must be 1 or 2, got {phase}")
    card = state.cardinality[cluster - 1]
    odd = card % 2 == 1
    if phase == 1:
        if not odd:
            return []
        v = _pick_ghost_defect(code, state, cluster, "nearest")
        _, side = code.nearest_boundary(state.defects[v])
        return [(v, side)]
    if odd:
        if prev_side not in (LEFT, RIGHT):
            raise ValueError(
                "second-phase ghost for an odd cluster needs the first phase's side"
            )
        side = RIGHT if prev_side == LEFT else LEFT
        return [(_pick_ghost_defect(code, state, cluster, side), side)]
    return [
        (_pick_ghost_defect(code, state, cluster, LEFT), LEFT),
        (_pick_ghost_defect(code, state, cluster, RIGHT), RIGHT),
    ]


def build_match(
    code: SurfaceCode,
    s_i: int,
    s_j: Optional[int] = None,
    *,
    boundary: Optional[str] = None,
    side: Side = Side.PRIMAL,
) -> frozenset[int]:
    """Qubits on the straight path between two defects, or defect to boundary.

    Defect-to-defect walks the vertical leg first, then the horizontal leg;
    the path size equals ``eval_d(s_i, s_j)``.  Defect-to-boundary collects
    the horizontal qubits straight to the given side.  Pure index arithmetic.
    """
    if (s_j is None) == (boundary is None):
        raise ValueError("pass exactly one of s_j or boundary")
    if boundary is not None:
        return code.boundary_path_qubits(s_i, boundary, side)
    return code.path_qubits(s_i, s_j, side)


def _matching_from(
    code: SurfaceCode, qubits: set[int], ghosts: Sequence[GhostAttachment], side: Side
) -> Matching:
    parity = [0] * code.d
    for q in qubits:
        k = code.grid_column_of(side, q)
        if k is not None:
            parity[k - 1] ^= 1
    if not ghosts:
        ghost_side = NONE
    elif len(ghosts) == 1:
        ghost_side = ghosts[0][1]
    else:
        ghost_side = BOTH
    return Matching(frozenset(qubits), len(qubits), tuple(parity), ghost_side)


def peel(
    code: SurfaceCode,
    state: ClusterState,
    cluster: int,
    ghosts: Sequence[GhostAttachment] = (),
    side: Side = Side.PRIMAL,
) -> Matching:
    """Peel a cluster tree into a matching.

    Ghost paths are applied first (toggling their defect's state), then
    order-1 vertices are processed in cluster-list order: a switched-on leaf
    contributes its incident tree path and flips its neighbor; either way the
    edge is removed.  Paths accumulate by symmetric difference, so shared
    qubits cancel.  The state does not mutate; peeling works on local copies.
    """
    members = state.cluster_lists[cluster - 1]
    on = {v: True for v in members}
    qubits: set[int] = set()
    for v, bside in ghosts:
        qubits ^= code.boundary_path_qubits(state.defects[v], bside, side)
        on[v] = not on[v]
    deg = {v: state.order[v] for v in members}
    removed: set[frozenset[int]] = set()
    edges_left = len(members) - 1
    while edges_left > 0:
        progressed = False
        for v in members:
            if deg[v] != 1:
                continue
            u = next(
                w for w in sorted(state.adjacency[v]) if frozenset((v, w)) not in removed
            )
            if on[v]:
                qubits ^= code.path_qubits(state.defects[v], state.defects[u], side)
                on[v] = False
                on[u] = not on[u]
            removed.add(frozenset((v, u)))
            deg[v] = 0
            deg[u] -= 1
            edges_left -= 1
            progressed = True
        if not progressed:
            raise ValueError(f"cluster {cluster} adjacency is not a tree")
    if any(on.values()):
        raise ValueError(
            f"cluster {cluster} peeling left a defect uncleared; "
            "ghost attachments do not match the cluster parity"
        )
    return _matching_from(code, qubits, ghosts, side)


def post_process(
    code: SurfaceCode,
    t: int,
    state: ClusterState,
    cluster: int,
    m1: Matching,
    side: Side = Side.PRIMAL,
) -> Matching:
    """Select a cluster's final matching from the first-phase result."""
    chosen, _, _ = _post_process_detail(code, t, state, cluster, m1, side)
    return chosen


def _post_process_detail(
    code: SurfaceCode,
    t: int,
    state: ClusterState,
    cluster: int,
    m1: Matching,
    side: Side,
) -> tuple[Matching, str, Optional[Matching]]:
    """(chosen matching, decision rule fired, second matching if computed).

    Rules, in order: w1 <= t keeps m1 without computing m2; then w2 <= t,
    w1 = t+1, w2 = t+1; finally the column metric, ties keeping m1.
    """
    if m1.weight <= t:
        return m1, "w1<=t", None
    prev = m1.ghost_side if m1.ghost_side in (LEFT, RIGHT) else None
    ghosts2 = add_ghost(code, state, cluster, phase=2, prev_side=prev)
    m2 = peel(code, state, cluster, ghosts2, side)
    if m2.weight <= t:
        return m2, "w2<=t", m2
    if m1.weight == t + 1:
        return m1, "w1=t+1", m2
    if m2.weight == t + 1:
        return m2, "w2=t+1", m2
    if m2.column_metric < m1.column_metric:
        return m2, "column-metric", m2
    return m1, "column-metric", m2


def high_distance_merge(
    code: SurfaceCode, state: ClusterState, radius: int
) -> ClusterState:
    """Post-clustering merge rules for d >= 11, applied in place.

    (a) Exactly two singleton clusters at eval_d = radius+1 merge with one
    connecting edge.  (b) A singleton whose nearest-boundary distance equals
    its distance to a defect of an odd cluster attaches to that cluster
    (lowest qualifying cluster index, then lowest defect index).  Merged
    clusters take the smaller of the two original indices; the absorbed list
    is appended to the surviving one.
    """
    singles = [k for k in range(1, state.num_clusters + 1) if state.cardinality[k - 1] == 1]
    if len(singles) == 2:
        k1, k2 = singles
        u = state.cluster_lists[k1 - 1][0]
        w = state.cluster_lists[k2 - 1][0]
        dist = code.eval_d(state.defects[u], state.defects[w])
        if dist == radius + 1:
            _merge_clusters(state, k1, k2, u, w, dist)
    k = 1
    while k <= state.num_clusters:
        if state.cardinality[k - 1] != 1:
            k += 1
            continue
        u = state.cluster_lists[k - 1][0]
        bd = code.boundary_distance(state.defects[u], "nearest")
        target = None
        for c in range(1, state.num_clusters + 1):
            if c == k or state.cardinality[c - 1] % 2 == 0:
                continue
            qualifying = [
                w
                for w in state.cluster_lists[c - 1]
                if code.eval_d(state.defects[u], state.defects[w]) == bd
            ]
            if qualifying:
                target = (c, min(qualifying, key=lambda w: state.defects[w]))
                break
        if target is None:
            k += 1
            continue
        c, w = target
        merged = _merge_clusters(state, c, k, w, u, bd)
        # resume from the slot after the merged cluster if the singleton sat
        # before it, otherwise stay put (indices above the removed slot shift)
        k = merged + 1 if merged >= k else k
    return state


def _merge_clusters(
    state: ClusterState, k_target: int, k_source: int, via: int, newcomer: int, dist: int
) -> int:
    """Join two clusters with an edge via -> newcomer; returns the merged index."""
    state.adjacency[via].add(newcomer)
    state.adjacency[newcomer].add(via)
    state.order[via] += 1
    state.order[newcomer] += 1
    parent_fix = newcomer if state.parent[newcomer] == -1 else None
    if parent_fix is not None:
        state.parent[newcomer] = via
        state.nearest_edge_len[newcomer] = dist
    lo, hi = min(k_target, k_source), max(k_target, k_source)
    merged_list = state.cluster_lists[k_target - 1] + state.cluster_lists[k_source - 1]
    state.cluster_lists[lo - 1] = merged_list
    del state.cluster_lists[hi - 1]
    state.cardinality = [len(m) for m in state.cluster_lists]
    state.num_clusters = len(state.cluster_lists)
    for idx, members in enumerate(state.cluster_lists):
        for v in members:
            state.membership[v] = idx + 1
    return lo


def decode_side(
    code: SurfaceCode,
    syndrome: Union[Syndrome, Sequence[int]],
    config: BcConfig = BcConfig(),
    side: Optional[Side] = None,
) -> frozenset[int]:
    """Decode one side's syndrome into a correction qubit set.

    The correction always clears the syndrome.  ``side`` defaults to the
    syndrome's own side (primal for bare defect lists).
    """
    correction, _ = decode_side_detailed(code, syndrome, config, side)
    return correction


def decode_side_detailed(
    code: SurfaceCode,
    syndrome: Union[Syndrome, Sequence[int]],
    config: BcConfig = BcConfig(),
    side: Optional[Side] = None,
) -> tuple[frozenset[int], dict]:
    """Decode with per-cluster diagnostics (radius, weights, rule fired)."""
    if side is None:
        side = syndrome.side if isinstance(syndrome, Syndrome) else Side.PRIMAL
    defects = _as_defects(syndrome)
    diag: dict = {
        "side": side.value,
        "n_d": len(defects),
        "radius": None,
        "num_clusters": 0,
        "clusters": [],
    }
    if not defects:
        return frozenset(), diag
    radius = bubble_radius(code.t, len(defects), adjusted=config.enable_radius_adjustment)
    diag["radius"] = radius
    state = bubble_cluster(code, defects, radius, config)
    if config.enable_high_distance_rules and code.d >= 11:
        high_distance_merge(code, state, radius)
    diag["num_clusters"] = state.num_clusters
    correction: set[int] = set()
    for k in range(1, state.num_clusters + 1):
        ghosts1 = add_ghost(code, state, k, phase=1)
        m1 = peel(code, state, k, ghosts1, side)
        chosen, rule, m2 = _post_process_detail(code, code.t, state, k, m1, side)
        correction ^= chosen.qubit_set
        diag["clusters"].append(
            {
                "defects": state.cluster_sites(k),
                "w1": m1.weight,
                "w2": m2.weight if m2 is not None else None,
                "rule": rule,
                "ghost_side_1": m1.ghost_side,
                "chosen_weight": chosen.weight,
            }
        )
    return frozenset(correction), diag
