"""Planar surface-code geometry: qubit indexing, defect grids, syndromes, logicals.

The [[n,1,d]] planar code with n = d^2 + (d-1)^2 data qubits is laid out as d rows
of d horizontal qubits (indices 0 .. d^2-1, row-major) followed by d-1 rows of d-1
vertical qubits (indices d^2 .. n-1, row-major).  X-type generators sit between
horizontally adjacent qubits and form the primal defect grid, d rows by d-1
columns; Z-type generators (plaquettes) form the dual grid, which is the primal
grid with rows/columns and boundary roles transposed.  Defect indices on either
grid are row-major: ``s = row * (d-1) + col``.

Everything here is immutable after construction and safe for concurrent reads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable, Optional


class Side(Enum):
    """Which independent decoding problem a syndrome belongs to.

    PRIMAL: Z errors detected by X generators.  DUAL: X errors detected by Z
    generators, laid out on the transposed grid so both sides share the same
    row/column arithmetic.
    """

    PRIMAL = "primal"
    DUAL = "dual"


LEFT = "left"
RIGHT = "right"
NEAREST = "nearest"

LATTICE_SCHEMA = "bubblecode-lattice/1"


@dataclass(frozen=True)
class Syndrome:
    """Sorted defect indices on one defect grid."""

    defects: tuple[int, ...]
    side: Side = Side.PRIMAL

    def __post_init__(self):
        object.__setattr__(self, "defects", tuple(sorted(self.defects)))

    def __len__(self) -> int:
        return len(self.defects)


class SurfaceCode:
    """Geometry of an [[n,1,d]] planar surface code.

    Parameters
    ----------
    d : int
        Code distance, >= 3.  Both parities are supported; the defect-grid
        divisor is d-1 (equal to 2t for odd d).
    """

    def __init__(self, d: int):
        if d < 3:
            raise ValueError(f"code distance must be >= 3, got {d}")
        self.d = d
        self.t = (d - 1) // 2
        self.n = d * d + (d - 1) * (d - 1)
        self.num_horizontal = d * d
        self.num_defect_sites = d * (d - 1)

    # ----- qubit indexing -------------------------------------------------

    def horizontal_qubit(self, row: int, h: int) -> int:
        """Index of the h-th horizontal qubit in a row (both 0-based)."""
        return row * self.d + h

    def vertical_qubit(self, vrow: int, vcol: int) -> int:
        """Index of the vertical qubit between site rows vrow and vrow+1."""
        return self.d * self.d + vrow * (self.d - 1) + vcol

    def qubit_position(self, q: int) -> tuple[str, int, int]:
        """Return ("H", row, h) or ("V", vrow, vcol) for a qubit index."""
        if not 0 <= q < self.n:
            raise IndexError(f"qubit index {q} out of range for n={self.n}")
        if q < self.num_horizontal:
            return ("H", q // self.d, q % self.d)
        q -= self.num_horizontal
        return ("V", q // (self.d - 1), q % (self.d - 1))

    def is_horizontal(self, q: int) -> bool:
        return 0 <= q < self.num_horizontal

    # ----- defect grid ----------------------------------------------------

    def defect_coords(self, s: int) -> tuple[int, int]:
        """Grid (row, col) of a defect site; 0<=row<d, 0<=col<d-1."""
        self._check_defect(s)
        return divmod(s, self.d - 1)

    def defect_index(self, row: int, col: int) -> int:
        return row * (self.d - 1) + col

    def _check_defect(self, s: int):
        if not 0 <= s < self.num_defect_sites:
            raise IndexError(
                f"defect index {s} out of range for {self.num_defect_sites} sites"
            )

    def eval_d(self, s_i: int, s_j: int) -> int:
        """Defect-grid distance |q_i-q_j| + |r_i-r_j| with q, r = divmod(s, d-1).

        Equals the number of qubits on a shortest lattice path between the two
        sites (on either side's grid).
        """
        self._check_defect(s_i)
        self._check_defect(s_j)
        dm1 = self.d - 1
        qi, ri = divmod(s_i, dm1)
        qj, rj = divmod(s_j, dm1)
        return abs(qi - qj) + abs(ri - rj)

    def boundary_distance(self, s: int, which: str = NEAREST) -> int:
        """Number of horizontal qubits between a defect and a grid boundary.

        ``which`` is "left", "right" or "nearest"; nearest ties resolve left.
        """
        _, col = self.defect_coords(s)
        left = col + 1
        right = (self.d - 1) - col
        if which == LEFT:
            return left
        if which == RIGHT:
            return right
        if which == NEAREST:
            return min(left, right)
        raise ValueError(f"unknown boundary choice {which!r}")

    def nearest_boundary(self, s: int) -> tuple[int, str]:
        """(distance, side) of the closest boundary; ties report left."""
        _, col = self.defect_coords(s)
        left = col + 1
        right = (self.d - 1) - col
        if left <= right:
            return left, LEFT
        return right, RIGHT

    # ----- generators and syndromes ----------------------------------------

    def generator_support(self, side: Side, s: int) -> tuple[int, ...]:
        """Qubits measured by defect site ``s`` on the given side."""
        self._check_defect(s)
        d = self.d
        if side is Side.PRIMAL:
            row, col = divmod(s, d - 1)
            qs = [self.horizontal_qubit(row, col), self.horizontal_qubit(row, col + 1)]
            if row > 0:
                qs.append(self.vertical_qubit(row - 1, col))
            if row < d - 1:
                qs.append(self.vertical_qubit(row, col))
        else:
            # dual site (r', c') is the plaquette at (prow=c', pcol=r')
            pcol, prow = divmod(s, d - 1)
            qs = [
                self.horizontal_qubit(prow, pcol),
                self.horizontal_qubit(prow + 1, pcol),
            ]
            if pcol > 0:
                qs.append(self.vertical_qubit(prow, pcol - 1))
            if pcol < d - 1:
                qs.append(self.vertical_qubit(prow, pcol))
        return tuple(sorted(qs))

    @cached_property
    def _qubit_defects(self) -> dict[Side, list[tuple[int, ...]]]:
        """Per side, for each qubit, the defect sites it flips."""
        table = {}
        for side in Side:
            flips: list[list[int]] = [[] for _ in range(self.n)]
            for s in range(self.num_defect_sites):
                for q in self.generator_support(side, s):
                    flips[q].append(s)
            table[side] = [tuple(f) for f in flips]
        return table

    def qubit_defects(self, side: Side, q: int) -> tuple[int, ...]:
        """Defect sites flipped by a single error on qubit ``q`` (1 or 2)."""
        return self._qubit_defects[side][q]

    def syndrome_of(self, error: Iterable[int], side: Side) -> Syndrome:
        """Defects anticommuting with a Z-set (primal) or X-set (dual) error."""
        flips = self._qubit_defects[side]
        hit: set[int] = set()
        for q in error:
            hit.symmetric_difference_update(flips[q])
        return Syndrome(tuple(sorted(hit)), side)

    # ----- logical operators ------------------------------------------------

    @cached_property
    def z_logical(self) -> frozenset[int]:
        """Minimum-weight Z_L: the top row of horizontal qubits (weight d)."""
        return frozenset(range(self.d))

    @cached_property
    def x_logical(self) -> frozenset[int]:
        """Minimum-weight X_L: the left column of horizontal qubits (weight d)."""
        return frozenset(r * self.d for r in range(self.d))

    def crossing_logical(self, side: Side) -> frozenset[int]:
        """Support of the logical the given side's residual is tested against."""
        return self.x_logical if side is Side.PRIMAL else self.z_logical

    def is_logical_failure(self, residual: Iterable[int], side: Side) -> bool:
        """True iff a syndrome-free residual anticommutes with the crossing logical."""
        residual = frozenset(residual)
        syn = self.syndrome_of(residual, side)
        if syn.defects:
            raise ValueError(
                "residual has a nonempty syndrome; decoder failed to clear it"
            )
        return len(residual & self.crossing_logical(side)) % 2 == 1

    # ----- columns (decision-metric support) --------------------------------

    def column_of(self, q: int) -> Optional[int]:
        """Column 1..d of a horizontal qubit, None for vertical qubits."""
        if not 0 <= q < self.n:
            raise IndexError(f"qubit index {q} out of range for n={self.n}")
        if q < self.num_horizontal:
            return q % self.d + 1
        return None

    def grid_column_of(self, side: Side, q: int) -> Optional[int]:
        """Per-side column for the matching decision metric.

        On the dual side the roles transpose: "columns" are the rows of
        horizontal qubits.
        """
        if not self.is_horizontal(q):
            return None
        if side is Side.PRIMAL:
            return q % self.d + 1
        return q // self.d + 1

    def column_members(self, k: int) -> frozenset[int]:
        """All horizontal qubits in column k (1-based), one per row."""
        if not 1 <= k <= self.d:
            raise IndexError(f"column {k} out of range 1..{self.d}")
        return frozenset(self.horizontal_qubit(r, k - 1) for r in range(self.d))

    # ----- straight lattice paths (shared by every decoder) -----------------

    def _h_qubit(self, side: Side, row: int, h: int) -> int:
        """Qubit crossed by a horizontal grid step at offset h in grid row `row`."""
        if side is Side.PRIMAL:
            return row * self.d + h
        return h * self.d + row

    def _v_qubit(self, side: Side, row: int, col: int) -> int:
        """Qubit crossed between grid sites (row, col) and (row+1, col)."""
        if side is Side.PRIMAL:
            return self.d * self.d + row * (self.d - 1) + col
        return self.d * self.d + col * (self.d - 1) + row

    def path_qubits(self, s_i: int, s_j: int, side: Side = Side.PRIMAL) -> frozenset[int]:
        """Qubits on the canonical two-leg path: vertical first, then horizontal.

        The result size equals ``eval_d(s_i, s_j)``.
        """
        ri, ci = self.defect_coords(s_i)
        rj, cj = self.defect_coords(s_j)
        qs = []
        for r in range(min(ri, rj), max(ri, rj)):
            qs.append(self._v_qubit(side, r, ci))
        for h in range(min(ci, cj) + 1, max(ci, cj) + 1):
            qs.append(self._h_qubit(side, rj, h))
        return frozenset(qs)

    def boundary_path_qubits(
        self, s: int, which: str, side: Side = Side.PRIMAL
    ) -> frozenset[int]:
        """Horizontal qubits from a defect straight to the given boundary."""
        row, col = self.defect_coords(s)
        if which == LEFT:
            span = range(0, col + 1)
        elif which == RIGHT:
            span = range(col + 1, self.d)
        else:
            raise ValueError(f"boundary path needs 'left' or 'right', got {which!r}")
        return frozenset(self._h_qubit(side, row, h) for h in span)

    # ----- geometry dump -----------------------------------------------------

    def describe(self) -> dict:
        """JSON-ready geometry document (schema bubblecode-lattice/1)."""
        qubits = []
        for q in range(self.n):
            kind, a, b = self.qubit_position(q)
            entry = {"index": q, "kind": kind, "row": a, "col": b}
            if kind == "H":
                entry["column"] = self.column_of(q)
            qubits.append(entry)
        generators = {
            side.value: [
                {
                    "index": s,
                    "row": self.defect_coords(s)[0],
                    "col": self.defect_coords(s)[1],
                    "support": list(self.generator_support(side, s)),
                }
                for s in range(self.num_defect_sites)
            ]
            for side in Side
        }
        return {
            "schema": LATTICE_SCHEMA,
            "d": self.d,
            "t": self.t,
            "n": self.n,
            "num_defect_sites": self.num_defect_sites,
            "qubits": qubits,
            "generators": generators,
            "columns": {
                str(k): sorted(self.column_members(k)) for k in range(1, self.d + 1)
            },
            "z_logical": sorted(self.z_logical),
            "x_logical": sorted(self.x_logical),
        }

    def __repr__(self) -> str:
        return f"SurfaceCode(d={self.d})"
