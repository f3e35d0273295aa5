"""Code-capacity depolarizing channel with replayable counter-based sampling.

Each data qubit independently suffers X, Y or Z with probability p/3 each.  The
generator is Philox4x64 (numpy.random.Philox) keyed by (seed, stream_id), so any
(seed, stream_id) pair is an independent substream and sequences replay bit-exactly
across runs and platforms.  One uniform is consumed per qubit per shot, in qubit
order, regardless of batching.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import SurfaceCode


@dataclass(frozen=True)
class PauliError:
    """A Pauli error as its Z and X components; Y = membership in both."""

    z_set: frozenset[int] = frozenset()
    x_set: frozenset[int] = frozenset()

    @property
    def weight(self) -> int:
        return len(self.z_set | self.x_set)

    def compose(self, other: "PauliError") -> "PauliError":
        """Composition up to phase: componentwise symmetric difference."""
        return PauliError(self.z_set ^ other.z_set, self.x_set ^ other.x_set)


def split_sides(error: PauliError) -> tuple[frozenset[int], frozenset[int]]:
    """(z_component, x_component): the primal and dual decoding problems."""
    return error.z_set, error.x_set


class DepolarizingChannel:
    """i.i.d. depolarizing noise source over a code's data qubits.

    Value-like: construct one per worker; there is no shared mutable state
    beyond the instance's own generator position.
    """

    def __init__(self, p: float, seed: int = 0, stream_id: int = 0):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"physical error rate must be in [0,1], got {p}")
        self.p = p
        self.seed = seed
        self.stream_id = stream_id
        self._rng = np.random.Generator(
            np.random.Philox(key=np.array([seed, stream_id], dtype=np.uint64))
        )

    def sample_batch(self, code: SurfaceCode, shots: int) -> tuple[np.ndarray, np.ndarray]:
        """(z_flips, x_flips) boolean arrays of shape (shots, n).

        Per qubit: u < p/3 -> X, u < 2p/3 -> Y, u < p -> Z.  Z flips are Z or Y
        draws, X flips are X or Y draws.
        """
        u = self._rng.random((shots, code.n))
        p = self.p
        z_flips = (u >= p / 3) & (u < p)
        x_flips = u < 2 * p / 3
        return z_flips, x_flips

    def sample_error(self, code: SurfaceCode) -> PauliError:
        """Draw one error; deterministic given (seed, stream_id, draw counter)."""
        z, x = self.sample_batch(code, 1)
        return PauliError(
            frozenset(np.flatnonzero(z[0]).tolist()),
            frozenset(np.flatnonzero(x[0]).tolist()),
        )


def sample_error(channel: DepolarizingChannel, code: SurfaceCode) -> PauliError:
    return channel.sample_error(code)
