"""Compiled decoder engine.

The functions here implement exactly the algorithm in :mod:`bubblecode.bc`
on flat integer arrays, fused into a single nopython call per decode so the
per-decode cost stays in the microsecond range.  The cluster forest is kept
as parent pointers plus per-defect child lists (every non-root defect owns
exactly its parent edge), which lets the sweep, the merges and the peeling
all run without per-call matrix scratch.  ``BubbleDecoder`` owns the scratch
buffers; one instance per worker.

Differential tests pin this engine to the pure-Python reference on random
syndromes across distances, sides and configuration toggles.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .bc import BcConfig
from .lattice import Side, SurfaceCode

LEFT_CODE = 0
RIGHT_CODE = 1
NEAREST_CODE = 2

# rows of the packed int64 scratch (each sized num_sites + 1)
(
    _MEMBERSHIP, _PARENT, _NEARLEN, _ORDER, _LIST, _TMP, _DEG,
    _ROW, _COL, _CSTART, _CCOUNT, _NXT,
) = range(12)
# rows of the packed uint8 scratch (each sized n)
_ON, _EREM, _MBUF1, _MBUF2, _CBUF, _COLPAR1, _COLPAR2 = range(7)
# rows of the packed touch-list scratch
_MTOUCH1, _MTOUCH2, _CTOUCH, _OUT = range(4)


@njit(cache=True, inline="always")
def _dist(rows, cols, i, j):
    return abs(rows[i] - rows[j]) + abs(cols[i] - cols[j])


@njit(cache=True)
def _cluster(n_d, radius, star, i64p, child):
    """Bubble sweep over precomputed coordinates; returns the cluster count.

    The unassigned defects sit in an index-ordered linked list so each
    member's scan only touches defects that can still be attached; the
    star-avoidance check walks the member's sibling list instead.
    """
    membership = i64p[_MEMBERSHIP]
    parent = i64p[_PARENT]
    near_len = i64p[_NEARLEN]
    order = i64p[_ORDER]
    list_order = i64p[_LIST]
    cluster_start = i64p[_CSTART]
    ccount = i64p[_CCOUNT]
    nxt = i64p[_NXT]
    rows = i64p[_ROW]
    cols = i64p[_COL]
    for i in range(n_d):
        membership[i] = 0
        parent[i] = -1
        near_len[i] = 0
        order[i] = 0
        ccount[i] = 0
        nxt[i] = i + 1
    head = 0
    nc = 0
    total = 0
    while total < n_d:
        # the list keeps index order, so its head is the next seed
        seed = head
        head = nxt[seed]
        cluster_start[nc] = total
        nc += 1
        membership[seed] = nc
        list_order[total] = seed
        total += 1
        cursor = cluster_start[nc - 1]
        while cursor < total:
            u = list_order[cursor]
            ru = rows[u]
            cu = cols[u]
            # attach every unassigned defect inside the bubble, in index order;
            # the list is row-major ordered, so the scan can stop once it
            # falls more than radius rows below the member
            prev = -1
            w = head
            row_cap = ru + radius
            while w < n_d:
                if rows[w] > row_cap:
                    break
                dist = abs(ru - rows[w]) + abs(cu - cols[w])
                if dist <= radius:
                    membership[w] = nc
                    parent[w] = u
                    near_len[w] = dist
                    child[u, ccount[u]] = w
                    ccount[u] += 1
                    order[u] += 1
                    order[w] += 1
                    list_order[total] = w
                    total += 1
                    if prev == -1:
                        head = nxt[w]
                    else:
                        nxt[prev] = nxt[w]
                    w = nxt[w]
                else:
                    prev = w
                    w = nxt[w]
            # re-parent any sibling that sits strictly closer to this member
            # than to their shared parent
            if star == 1 and parent[u] != -1:
                p = parent[u]
                i = 0
                while i < ccount[p]:
                    w = child[p, i]
                    if w != u:
                        dist = abs(ru - rows[w]) + abs(cu - cols[w])
                        if dist < near_len[w]:
                            ccount[p] -= 1
                            child[p, i] = child[p, ccount[p]]
                            order[p] -= 1
                            child[u, ccount[u]] = w
                            ccount[u] += 1
                            order[u] += 1
                            parent[w] = u
                            near_len[w] = dist
                            continue  # slot i now holds a fresh entry
                    i += 1
            cursor += 1
    cluster_start[nc] = total
    return nc


@njit(cache=True)
def _merge_two(kt, ks, via, newcomer, dist, nc, i64p, child):
    """Join clusters kt and ks with an edge via->newcomer; returns (nc-1, lo)."""
    membership = i64p[_MEMBERSHIP]
    parent = i64p[_PARENT]
    near_len = i64p[_NEARLEN]
    order = i64p[_ORDER]
    list_order = i64p[_LIST]
    tmp = i64p[_TMP]
    cluster_start = i64p[_CSTART]
    ccount = i64p[_CCOUNT]
    child[via, ccount[via]] = newcomer
    ccount[via] += 1
    order[via] += 1
    order[newcomer] += 1
    if parent[newcomer] == -1:
        parent[newcomer] = via
        near_len[newcomer] = dist
    lo = min(kt, ks)
    hi = max(kt, ks)
    idx = 0
    for k in range(1, nc + 1):
        if k == hi:
            continue
        if k == lo:
            for i in range(cluster_start[kt - 1], cluster_start[kt]):
                tmp[idx] = list_order[i]
                idx += 1
            for i in range(cluster_start[ks - 1], cluster_start[ks]):
                tmp[idx] = list_order[i]
                idx += 1
        else:
            for i in range(cluster_start[k - 1], cluster_start[k]):
                tmp[idx] = list_order[i]
                idx += 1
    size_lo = (cluster_start[kt] - cluster_start[kt - 1]) + (
        cluster_start[ks] - cluster_start[ks - 1]
    )
    new_nc = nc - 1
    pos = 0
    kk = 0
    for k in range(1, nc + 1):
        if k == hi:
            continue
        size = size_lo if k == lo else cluster_start[k] - cluster_start[k - 1]
        cluster_start[kk] = pos
        pos += size
        kk += 1
    cluster_start[new_nc] = pos
    for i in range(pos):
        list_order[i] = tmp[i]
    for k in range(1, new_nc + 1):
        for i in range(cluster_start[k - 1], cluster_start[k]):
            membership[list_order[i]] = k
    return new_nc, lo


@njit(cache=True)
def _high_distance_merge(defects, d, radius, nc, i64p, child):
    rows = i64p[_ROW]
    cols = i64p[_COL]
    list_order = i64p[_LIST]
    cluster_start = i64p[_CSTART]
    dm1 = d - 1
    # rule (a): exactly two singletons at distance radius+1 merge
    k1 = -1
    k2 = -1
    singles = 0
    for k in range(1, nc + 1):
        if cluster_start[k] - cluster_start[k - 1] == 1:
            singles += 1
            if k1 == -1:
                k1 = k
            elif k2 == -1:
                k2 = k
    if singles == 2:
        u = list_order[cluster_start[k1 - 1]]
        w = list_order[cluster_start[k2 - 1]]
        if _dist(rows, cols, u, w) == radius + 1:
            nc, _ = _merge_two(k1, k2, u, w, radius + 1, nc, i64p, child)
    # rule (b): singleton equidistant to a boundary and an odd cluster joins it
    k = 1
    while k <= nc:
        if cluster_start[k] - cluster_start[k - 1] != 1:
            k += 1
            continue
        u = list_order[cluster_start[k - 1]]
        left = cols[u] + 1
        right = dm1 - cols[u]
        bd = left if left <= right else right
        target_c = -1
        target_w = -1
        for c in range(1, nc + 1):
            if c == k:
                continue
            size = cluster_start[c] - cluster_start[c - 1]
            if size % 2 == 0:
                continue
            for i in range(cluster_start[c - 1], cluster_start[c]):
                w = list_order[i]
                if _dist(rows, cols, u, w) == bd:
                    if target_w == -1 or defects[w] < defects[target_w]:
                        target_w = w
            if target_w != -1:
                target_c = c
                break
        if target_c == -1:
            k += 1
            continue
        nc, lo = _merge_two(target_c, k, target_w, u, bd, nc, i64p, child)
        if lo >= k:
            k = lo + 1
    return nc


@njit(cache=True, inline="always")
def _cluster_nnd(v, start, end, rows, cols, list_order):
    """Distance from v to its nearest cluster neighbor (0 for singletons)."""
    best = 0
    for j in range(start, end):
        w = list_order[j]
        if w != v:
            dd = _dist(rows, cols, v, w)
            if best == 0 or dd < best:
                best = dd
    return best


@njit(cache=True)
def _pick_ghost(k, which, dm1, defects, i64p):
    """Cluster defect closest to the requested boundary; ties go to the
    defect farthest from its cluster (max nearest-neighbor distance), then
    to the lowest site index.  Neighbor distances are only computed when the
    boundary distance actually ties."""
    rows = i64p[_ROW]
    cols = i64p[_COL]
    list_order = i64p[_LIST]
    cluster_start = i64p[_CSTART]
    start = cluster_start[k - 1]
    end = cluster_start[k]
    if end - start == 1:
        return list_order[start]
    best_v = -1
    best_bd = 0
    ties = 0
    for i in range(start, end):
        v = list_order[i]
        left = cols[v] + 1
        right = dm1 - cols[v]
        if which == LEFT_CODE:
            bd = left
        elif which == RIGHT_CODE:
            bd = right
        else:
            bd = left if left <= right else right
        if best_v == -1 or bd < best_bd:
            best_v = v
            best_bd = bd
            ties = 1
        elif bd == best_bd:
            ties += 1
    if ties == 1:
        return best_v
    best_v = -1
    best_nnd = 0
    for i in range(start, end):
        v = list_order[i]
        left = cols[v] + 1
        right = dm1 - cols[v]
        if which == LEFT_CODE:
            bd = left
        elif which == RIGHT_CODE:
            bd = right
        else:
            bd = left if left <= right else right
        if bd != best_bd:
            continue
        nnd = _cluster_nnd(v, start, end, rows, cols, list_order)
        if (
            best_v == -1
            or nnd > best_nnd
            or (nnd == best_nnd and defects[v] < defects[best_v])
        ):
            best_v = v
            best_nnd = nnd
    return best_v


@njit(cache=True, inline="always")
def _toggle(q, col, mbuf, mtouch, ntouch, weight, colpar):
    if mbuf[q]:
        mbuf[q] = 0
        weight -= 1
    else:
        mbuf[q] = 1
        weight += 1
        mtouch[ntouch] = q
        ntouch += 1
    if col >= 0:
        colpar[col] ^= 1
    return ntouch, weight


@njit(cache=True)
def _toggle_path(vi, vj, d, side_dual, i64p, mbuf, mtouch, ntouch, weight, colpar):
    """Vertical leg first, then horizontal, toggling every crossed qubit."""
    rows = i64p[_ROW]
    cols = i64p[_COL]
    dm1 = d - 1
    dsq = d * d
    ri, ci = rows[vi], cols[vi]
    rj, cj = rows[vj], cols[vj]
    lo = min(ri, rj)
    hi = max(ri, rj)
    for r in range(lo, hi):
        if side_dual == 1:
            q = dsq + ci * dm1 + r
        else:
            q = dsq + r * dm1 + ci
        ntouch, weight = _toggle(q, -1, mbuf, mtouch, ntouch, weight, colpar)
    lo = min(ci, cj) + 1
    hi = max(ci, cj) + 1
    for h in range(lo, hi):
        if side_dual == 1:
            q = h * d + rj
        else:
            q = rj * d + h
        ntouch, weight = _toggle(q, h, mbuf, mtouch, ntouch, weight, colpar)
    return ntouch, weight


@njit(cache=True)
def _toggle_boundary(v, bside, d, side_dual, i64p, mbuf, mtouch, ntouch, weight, colpar):
    row = i64p[_ROW][v]
    col = i64p[_COL][v]
    if bside == LEFT_CODE:
        lo, hi = 0, col + 1
    else:
        lo, hi = col + 1, d
    for h in range(lo, hi):
        if side_dual == 1:
            q = h * d + row
        else:
            q = row * d + h
        ntouch, weight = _toggle(q, h, mbuf, mtouch, ntouch, weight, colpar)
    return ntouch, weight


@njit(cache=True)
def _peel(k, g1pos, g1side, g2pos, g2side, d, side_dual, i64p, child, on, erem,
          mbuf, mtouch, colpar):
    """Peel one cluster; returns (weight, ntouch) or (-1, 0) on a violated
    tree/parity contract.

    Every non-root defect owns its parent edge, so ``erem[v]`` marks the
    edge above v as removed; a leaf's one live edge is either its own parent
    edge or the parent edge of its single remaining child.
    """
    parent = i64p[_PARENT]
    order = i64p[_ORDER]
    list_order = i64p[_LIST]
    cluster_start = i64p[_CSTART]
    deg = i64p[_DEG]
    ccount = i64p[_CCOUNT]
    start = cluster_start[k - 1]
    end = cluster_start[k]
    for i in range(d):
        colpar[i] = 0
    for i in range(start, end):
        v = list_order[i]
        on[v] = 1
        deg[v] = order[v]
        erem[v] = 0
    ntouch = 0
    weight = 0
    if g1pos >= 0:
        ntouch, weight = _toggle_boundary(
            g1pos, g1side, d, side_dual, i64p, mbuf, mtouch, ntouch, weight, colpar
        )
        on[g1pos] ^= 1
    if g2pos >= 0:
        ntouch, weight = _toggle_boundary(
            g2pos, g2side, d, side_dual, i64p, mbuf, mtouch, ntouch, weight, colpar
        )
        on[g2pos] ^= 1
    edges_left = (end - start) - 1
    while edges_left > 0:
        progressed = False
        for i in range(start, end):
            v = list_order[i]
            if deg[v] != 1:
                continue
            u = -1
            eid = -1
            if parent[v] != -1 and erem[v] == 0:
                u = parent[v]
                eid = v
            else:
                for j in range(ccount[v]):
                    w = child[v, j]
                    if erem[w] == 0:
                        u = w
                        eid = w
                        break
            if u == -1:
                return -1, 0
            if on[v]:
                ntouch, weight = _toggle_path(
                    v, u, d, side_dual, i64p, mbuf, mtouch, ntouch, weight, colpar
                )
                on[v] = 0
                on[u] ^= 1
            erem[eid] = 1
            deg[v] = 0
            deg[u] -= 1
            edges_left -= 1
            progressed = True
        if not progressed:
            return -1, 0
    for i in range(start, end):
        if on[list_order[i]]:
            return -1, 0
    return weight, ntouch


@njit(cache=True)
def _commit(mbuf, mtouch, ntouch, cbuf, ctouch, nctouch):
    """XOR a matching buffer into the correction buffer, clearing it."""
    for i in range(ntouch):
        q = mtouch[i]
        if mbuf[q]:
            mbuf[q] = 0
            if cbuf[q]:
                cbuf[q] = 0
            else:
                cbuf[q] = 1
                ctouch[nctouch] = q
                nctouch += 1
    return nctouch


@njit(cache=True)
def _reset(mbuf, mtouch, ntouch):
    for i in range(ntouch):
        mbuf[mtouch[i]] = 0


@njit(cache=True)
def _decode(defects, n_d, d, t, side_dual, adjust, star, highd, i64p, u8p, touchp, child):
    """Full single-side decode; fills the output row of ``touchp`` and returns
    the correction size (or -1 on a violated internal contract)."""
    if n_d == 0:
        return 0
    dm1 = d - 1
    rows = i64p[_ROW]
    cols = i64p[_COL]
    for i in range(n_d):
        s = defects[i]
        rows[i] = s // dm1
        cols[i] = s % dm1
    base = t + 2 - (n_d + 1) // 2
    if adjust == 1:
        radius = base if n_d <= 2 * t else 2
    else:
        radius = base if base > 1 else 1
    on = u8p[_ON]
    erem = u8p[_EREM]
    mbuf1 = u8p[_MBUF1]
    mbuf2 = u8p[_MBUF2]
    cbuf = u8p[_CBUF]
    colpar1 = u8p[_COLPAR1]
    colpar2 = u8p[_COLPAR2]
    mtouch1 = touchp[_MTOUCH1]
    mtouch2 = touchp[_MTOUCH2]
    ctouch = touchp[_CTOUCH]
    out = touchp[_OUT]
    cluster_start = i64p[_CSTART]
    cols_arr = i64p[_COL]
    nc = _cluster(n_d, radius, star, i64p, child)
    if highd == 1 and d >= 11:
        nc = _high_distance_merge(defects, d, radius, nc, i64p, child)
    nctouch = 0
    for k in range(1, nc + 1):
        card = cluster_start[k] - cluster_start[k - 1]
        g1pos = -1
        g1side = -1
        if card % 2 == 1:
            g1pos = _pick_ghost(k, NEAREST_CODE, dm1, defects, i64p)
            g1side = (
                LEFT_CODE
                if cols_arr[g1pos] + 1 <= dm1 - cols_arr[g1pos]
                else RIGHT_CODE
            )
        w1, nt1 = _peel(
            k, g1pos, g1side, -1, -1, d, side_dual, i64p, child, on, erem,
            mbuf1, mtouch1, colpar1,
        )
        if w1 < 0:
            return -1
        use1 = True
        nt2 = 0
        if w1 > t:
            if card % 2 == 1:
                g2side = RIGHT_CODE if g1side == LEFT_CODE else LEFT_CODE
                g2pos = _pick_ghost(k, g2side, dm1, defects, i64p)
                w2, nt2 = _peel(
                    k, g2pos, g2side, -1, -1, d, side_dual, i64p, child, on, erem,
                    mbuf2, mtouch2, colpar2,
                )
            else:
                gl = _pick_ghost(k, LEFT_CODE, dm1, defects, i64p)
                gr = _pick_ghost(k, RIGHT_CODE, dm1, defects, i64p)
                w2, nt2 = _peel(
                    k, gl, LEFT_CODE, gr, RIGHT_CODE, d, side_dual, i64p, child,
                    on, erem, mbuf2, mtouch2, colpar2,
                )
            if w2 < 0:
                return -1
            if w2 <= t:
                use1 = False
            elif w1 == t + 1:
                use1 = True
            elif w2 == t + 1:
                use1 = False
            else:
                f1 = 0
                f2 = 0
                for i in range(d):
                    f1 += colpar1[i]
                    f2 += colpar2[i]
                use1 = f2 >= f1
        if use1:
            nctouch = _commit(mbuf1, mtouch1, nt1, cbuf, ctouch, nctouch)
            _reset(mbuf2, mtouch2, nt2)
        else:
            nctouch = _commit(mbuf2, mtouch2, nt2, cbuf, ctouch, nctouch)
            _reset(mbuf1, mtouch1, nt1)
    count = 0
    for i in range(nctouch):
        q = ctouch[i]
        if cbuf[q]:
            out[count] = q
            count += 1
            cbuf[q] = 0
    return count


class BubbleDecoder:
    """Reusable fast decoder for one code; owns per-instance scratch buffers.

    Stateless between calls apart from the scratch; construct one instance
    per worker or thread.
    """

    def __init__(self, code: SurfaceCode, config: BcConfig = BcConfig()):
        self.code = code
        self.config = config
        n = code.n
        m = code.num_defect_sites
        d = code.d
        # bound on total toggles in one decode: every peeled edge path is at
        # most max(radius, d) long plus two boundary legs per cluster
        touch_cap = max(d * d * (d + 2) + 4 * d + 16, 2 * n)
        self._i64p = np.zeros((12, m + 1), dtype=np.int64)
        self._u8p = np.zeros((7, n), dtype=np.uint8)
        self._touchp = np.zeros((4, touch_cap), dtype=np.int64)
        self._child = np.zeros((m, m), dtype=np.int64)
        self._side_code = {Side.PRIMAL: 0, Side.DUAL: 1}
        self._adjust = 1 if config.enable_radius_adjustment else 0
        self._star = 1 if config.enable_star_avoidance else 0
        self._highd = 1 if config.enable_high_distance_rules else 0

    def decode_count(self, defects: np.ndarray, side_dual: int = 0) -> int:
        """Decode a sorted int64 defect array; the correction lives in
        ``self.out_row[:count]`` until the next call.  Thin path for timing
        and Monte Carlo loops."""
        count = _decode(
            defects, len(defects), self.code.d, self.code.t, side_dual,
            self._adjust, self._star, self._highd,
            self._i64p, self._u8p, self._touchp, self._child,
        )
        if count < 0:
            raise RuntimeError("decoder internal contract violated")
        return count

    @property
    def out_row(self) -> np.ndarray:
        return self._touchp[_OUT]

    def bound_kernel(self):
        """Closure f(defects, side_dual) -> count with every argument prebound,
        for tight timing and Monte Carlo loops (no attribute lookups)."""
        kernel = _decode
        d = self.code.d
        t = self.code.t
        adjust, star, highd = self._adjust, self._star, self._highd
        i64p, u8p, touchp, child = self._i64p, self._u8p, self._touchp, self._child

        def call(defects: np.ndarray, side_dual: int = 0) -> int:
            return kernel(
                defects, len(defects), d, t, side_dual, adjust, star, highd,
                i64p, u8p, touchp, child,
            )

        return call

    def decode(self, defects: np.ndarray, side: Side = Side.PRIMAL) -> np.ndarray:
        """Correction qubit indices (unsorted copy) for a sorted defect array."""
        if len(defects) > self.code.num_defect_sites:
            raise ValueError("more defects than defect sites")
        count = self.decode_count(defects, self._side_code[side])
        return self._touchp[_OUT, :count].copy()

    def decode_set(self, defects, side: Side = Side.PRIMAL) -> frozenset[int]:
        arr = np.asarray(sorted(defects), dtype=np.int64)
        return frozenset(int(q) for q in self.decode(arr, side))

    def warmup(self) -> "BubbleDecoder":
        """Force JIT compilation (the first call is otherwise slow)."""
        self.decode(np.array([0, 1], dtype=np.int64), Side.PRIMAL)
        self.decode(np.array([0], dtype=np.int64), Side.DUAL)
        return self
