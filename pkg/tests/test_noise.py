"""Depolarizing channel: marginals, determinism, side splitting."""

import numpy as np
import pytest

from bubblecode.lattice import SurfaceCode
from bubblecode.noise import DepolarizingChannel, PauliError, split_sides


def test_p_zero_always_empty():
    code = SurfaceCode(3)
    ch = DepolarizingChannel(0.0, seed=1)
    for _ in range(20):
        err = ch.sample_error(code)
        assert err.weight == 0


def test_p_one_every_qubit_errored_with_uniform_pauli_mix():
    code = SurfaceCode(3)
    ch = DepolarizingChannel(1.0, seed=2)
    shots = 30_000
    z, x = ch.sample_batch(code, shots)
    assert np.all(z | x)  # some Pauli on every qubit
    n_y = int((z & x).sum())
    n_x = int((x & ~z).sum())
    n_z = int((z & ~x).sum())
    total = shots * code.n
    # chi-square against the uniform 1/3 split, 2 dof; 16.3 ~ p=3e-4
    expected = total / 3
    chi2 = sum((obs - expected) ** 2 / expected for obs in (n_x, n_y, n_z))
    assert chi2 < 16.3


def test_z_marginal_mean():
    code = SurfaceCode(3)
    p = 0.1
    ch = DepolarizingChannel(p, seed=3)
    shots = 1_000_000
    weights = np.zeros(shots, dtype=np.int64)
    done = 0
    while done < shots:
        chunk = min(100_000, shots - done)
        z, _ = ch.sample_batch(code, chunk)
        weights[done : done + chunk] = z.sum(axis=1)
        done += chunk
    per_qubit = 2 * p / 3
    mean = code.n * per_qubit
    sigma = np.sqrt(code.n * per_qubit * (1 - per_qubit) / shots)
    assert abs(weights.mean() - mean) < 3 * sigma


def test_reproducible_streams():
    code = SurfaceCode(5)
    a = DepolarizingChannel(0.2, seed=42, stream_id=7)
    b = DepolarizingChannel(0.2, seed=42, stream_id=7)
    za, xa = a.sample_batch(code, 50)
    zb, xb = b.sample_batch(code, 50)
    assert np.array_equal(za, zb) and np.array_equal(xa, xb)
    c = DepolarizingChannel(0.2, seed=42, stream_id=8)
    zc, _ = c.sample_batch(code, 50)
    assert not np.array_equal(za, zc)


def test_batching_does_not_change_the_stream():
    code = SurfaceCode(3)
    a = DepolarizingChannel(0.3, seed=9)
    b = DepolarizingChannel(0.3, seed=9)
    za, _ = a.sample_batch(code, 40)
    parts = [b.sample_batch(code, k)[0] for k in (13, 27)]
    assert np.array_equal(za, np.vstack(parts))


def test_rejects_bad_p():
    with pytest.raises(ValueError):
        DepolarizingChannel(-0.1)
    with pytest.raises(ValueError):
        DepolarizingChannel(1.5)


def test_split_sides():
    err = PauliError(frozenset({3}), frozenset({3}))  # pure Y on qubit 3
    assert split_sides(err) == (frozenset({3}), frozenset({3}))
    assert split_sides(PauliError()) == (frozenset(), frozenset())
    err = PauliError(frozenset({1}), frozenset({2}))
    assert split_sides(err) == (frozenset({1}), frozenset({2}))
    # recombination reproduces the original
    z, x = split_sides(err)
    assert PauliError(z, x) == err


def test_compose_is_symmetric_difference():
    a = PauliError(frozenset({1, 2}), frozenset({5}))
    b = PauliError(frozenset({2, 3}), frozenset({5, 6}))
    c = a.compose(b)
    assert c == PauliError(frozenset({1, 3}), frozenset({6}))
    assert a.compose(a) == PauliError()
