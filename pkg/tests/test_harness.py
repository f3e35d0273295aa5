"""Monte Carlo harness: stop rules, determinism, serialization, timing."""

import math
import os

import pytest

from bubblecode.bc import BcConfig
from bubblecode.harness import (
    ExperimentSpec,
    results_to_csv,
    results_to_json,
    run_logical_error_experiment,
    run_timing_benchmark,
    spec_from_dict,
    timings_to_csv,
    worker_count,
)


def small_spec(**overrides):
    base = dict(
        d_list=(3,),
        p_list=(0.08,),
        decoders=("bc",),
        min_logical_errors=25,
        max_shots=50_000,
        seed=7,
        batch_size=2_000,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def test_p_zero_truncates_at_max_shots():
    spec = small_spec(p_list=(0.0,), max_shots=6_000, min_logical_errors=5)
    (row,) = run_logical_error_experiment(spec)
    assert row.shots == 6_000
    assert row.logical_errors == 0
    assert row.truncated
    assert row.p_l == 0.0


def test_stop_rule_reaches_min_errors():
    (row,) = run_logical_error_experiment(small_spec())
    assert row.logical_errors >= 25
    assert not row.truncated
    assert row.shots % 2_000 == 0  # whole batches
    lo, hi = row.wilson
    assert lo <= row.p_l <= hi
    assert row.n_d_mean > 0 and row.n_d_max >= 2


def test_replay_is_bit_identical():
    spec = small_spec()
    a = run_logical_error_experiment(spec)
    b = run_logical_error_experiment(spec)
    assert a == b
    assert results_to_csv(a) == results_to_csv(b)


def test_rows_use_independent_streams():
    spec = small_spec(p_list=(0.08, 0.08))
    r1, r2 = run_logical_error_experiment(spec)
    # same distribution, different substreams: shot counts almost surely differ
    assert (r1.shots, r1.logical_errors) != (r2.shots, r2.logical_errors)


def test_worker_count_env(monkeypatch):
    monkeypatch.delenv("BUBBLECODE_THREADS", raising=False)
    assert worker_count(8) == 1
    monkeypatch.setenv("BUBBLECODE_THREADS", "4")
    assert worker_count(8) == 4
    assert worker_count(2) == 2
    monkeypatch.setenv("BUBBLECODE_THREADS", "zebra")
    with pytest.raises(ValueError):
        worker_count(2)


def test_parallel_rows_match_serial(monkeypatch):
    spec = small_spec(p_list=(0.06, 0.1), min_logical_errors=10)
    monkeypatch.delenv("BUBBLECODE_THREADS", raising=False)
    serial = run_logical_error_experiment(spec)
    monkeypatch.setenv("BUBBLECODE_THREADS", "2")
    parallel = run_logical_error_experiment(spec)
    assert serial == parallel


def test_z_only_policy_ignores_x_errors():
    both = run_logical_error_experiment(small_spec())[0]
    z_only = run_logical_error_experiment(small_spec(side_policy="z"))[0]
    # same stream, fewer failure opportunities per shot
    assert z_only.shots >= both.shots


def test_greedy_decoder_runs():
    spec = small_spec(decoders=("greedy",), min_logical_errors=10)
    (row,) = run_logical_error_experiment(spec)
    assert row.logical_errors >= 10


def test_spec_validation():
    with pytest.raises(ValueError):
        small_spec(p_list=(1.5,))
    with pytest.raises(ValueError):
        small_spec(min_logical_errors=0)
    with pytest.raises(ValueError):
        small_spec(decoders=("nonsense",))
    with pytest.raises(ValueError):
        small_spec(side_policy="x")


def test_csv_and_json_carry_identical_numbers():
    rows = run_logical_error_experiment(small_spec())
    csv_text = results_to_csv(rows)
    assert csv_text.startswith("# schema: bubblecode-results/1\n")
    header, data = csv_text.splitlines()[1], csv_text.splitlines()[2]
    import json

    doc = json.loads(results_to_json(rows))
    assert doc["schema"] == "bubblecode-results/1"
    rec = doc["rows"][0]
    values = dict(zip(header.split(","), data.split(",")))
    assert int(values["shots"]) == rec["shots"]
    assert float(values["p_l"]) == rec["p_l"]
    assert float(values["wilson_low"]) == rec["wilson_low"]
    # latency stays out of the default serialization (replay determinism)
    assert "latency" not in csv_text
    assert "mean_latency_us" not in rec


def test_latency_columns_are_opt_in():
    rows = run_logical_error_experiment(small_spec(min_logical_errors=5))
    text = results_to_csv(rows, include_latency=True)
    assert "mean_latency_us" in text.splitlines()[1]


def test_spec_from_dict_round_trip():
    doc = {
        "d_list": [3, 5],
        "p_list": [0.01],
        "decoders": ["bc", "greedy"],
        "config": {"enable_star_avoidance": False},
        "seed": 3,
        "min_logical_errors": 10,
    }
    spec = spec_from_dict(doc)
    assert spec.d_list == (3, 5)
    assert spec.decoders == ("bc", "greedy")
    assert spec.config == BcConfig(enable_star_avoidance=False)
    assert spec.min_logical_errors == 10


class TestTimingBenchmark:
    def test_basic_run(self):
        spec = ExperimentSpec(d_list=(5,), p_list=(0.01,), seed=1)
        rows = run_timing_benchmark(spec, n_d_list=(0, 2, 4), batch_size=50)
        assert [r.n_d for r in rows] == [0, 2, 4]
        for r in rows:
            assert r.available
            assert 0.0 <= r.mean_us < 1e4
            assert r.p50_us <= r.p99_us or math.isclose(r.p50_us, r.p99_us)

    def test_rejects_oversized_n_d(self):
        spec = ExperimentSpec(d_list=(3,), p_list=(0.01,))
        with pytest.raises(ValueError):
            run_timing_benchmark(spec, n_d_list=(7,), batch_size=10)

    def test_bc_beats_the_exact_oracle_at_overlapping_points(self):
        spec = ExperimentSpec(
            d_list=(5,), p_list=(0.01,), decoders=("bc", "mwpm"), seed=2
        )
        rows = run_timing_benchmark(spec, n_d_list=(2, 4, 8), batch_size=100)
        by = {(r.decoder, r.n_d): r for r in rows}
        for n_d in (2, 4, 8):
            assert by[("bc", n_d)].mean_us < by[("mwpm", n_d)].mean_us

    def test_mwpm_marked_unavailable_beyond_capacity(self):
        spec = ExperimentSpec(d_list=(7,), p_list=(0.01,), decoders=("mwpm",))
        rows = run_timing_benchmark(spec, n_d_list=(2, 20), batch_size=5)
        assert rows[0].available
        assert not rows[1].available
        assert math.isnan(rows[1].mean_us)
        text = timings_to_csv(rows)
        assert text.startswith("# schema: bubblecode-timing/1\n")
