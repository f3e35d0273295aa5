"""Monte Carlo logical-error-rate estimation and decode-time benchmarking.

Experiments are defined by an :class:`ExperimentSpec`; every (d, p, decoder)
combination is one row, sampled on its own Philox substream until the stop
rule fires (at least ``min_logical_errors`` failures or ``max_shots``).
Rows are independent, so results are byte-identical for any worker count;
``BUBBLECODE_THREADS`` caps the process pool used to spread rows.

Timing benchmarks decode fixed-defect-count batches and report mean/p50/p99
wall time per decode, measured around the decode call only, after a
discarded warmup batch.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from ._kernels import BubbleDecoder
from .bc import BcConfig
from .lattice import Side, SurfaceCode, Syndrome
from .noise import DepolarizingChannel
from .reference import CapacityError, greedy_decode, mwpm_decode, wilson_interval

RESULTS_SCHEMA = "bubblecode-results/1"
TIMING_SCHEMA = "bubblecode-timing/1"
THREADS_ENV = "BUBBLECODE_THREADS"

DECODER_NAMES = ("bc", "greedy", "mwpm")

RESULT_COLUMNS = (
    "d", "p", "decoder", "shots", "logical_errors", "p_l",
    "wilson_low", "wilson_high", "truncated", "n_d_mean", "n_d_max",
)
LATENCY_COLUMNS = ("mean_latency_us", "median_latency_us")
TIMING_COLUMNS = (
    "d", "n_d", "decoder", "batch_size", "available", "mean_us", "p50_us", "p99_us",
)


@dataclass(frozen=True)
class ExperimentSpec:
    """One logical-error-rate sweep: the cross product of d, p and decoders."""

    d_list: tuple[int, ...]
    p_list: tuple[float, ...]
    decoders: tuple[str, ...] = ("bc",)
    config: BcConfig = field(default_factory=BcConfig)
    min_logical_errors: int = 100
    max_shots: int = 10**8
    seed: int = 0
    side_policy: str = "both"  # "both" decodes X and Z, "z" decodes Z only
    batch_size: int = 10_000

    def __post_init__(self):
        if self.min_logical_errors < 1:
            raise ValueError("min_logical_errors must be >= 1")
        if self.max_shots < 1 or self.batch_size < 1:
            raise ValueError("max_shots and batch_size must be >= 1")
        for p in self.p_list:
            if not 0.0 <= p < 1.0:
                raise ValueError(f"physical error rate {p} outside [0,1)")
        for name in self.decoders:
            if name not in DECODER_NAMES:
                raise ValueError(f"unknown decoder {name!r}; options: {DECODER_NAMES}")
        if self.side_policy not in ("both", "z"):
            raise ValueError("side_policy must be 'both' or 'z'")

    def rows(self) -> list[tuple[int, float, str]]:
        return [
            (d, p, dec)
            for d in self.d_list
            for p in self.p_list
            for dec in self.decoders
        ]


@dataclass(frozen=True)
class ResultRow:
    d: int
    p: float
    decoder: str
    shots: int
    logical_errors: int
    truncated: bool
    n_d_mean: float
    n_d_max: int
    # decode-latency summaries are measurement noise: carried for reporting,
    # excluded from equality so replays compare equal
    mean_latency_us: float = field(compare=False, default=0.0)
    median_latency_us: float = field(compare=False, default=0.0)

    @property
    def p_l(self) -> float:
        return self.logical_errors / self.shots if self.shots else 0.0

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.logical_errors, self.shots)


@dataclass(frozen=True)
class TimingRow:
    d: int
    n_d: int
    decoder: str
    batch_size: int
    available: bool
    mean_us: float
    p50_us: float
    p99_us: float


class _SideTables:
    """Per-side fast lookups: qubit -> flipped defect sites, logical mask."""

    def __init__(self, code: SurfaceCode, side: Side):
        self.side = side
        self.flips = [frozenset(code.qubit_defects(side, q)) for q in range(code.n)]
        self.logical_mask = np.zeros(code.n, dtype=bool)
        self.logical_mask[sorted(code.crossing_logical(side))] = True


def _make_decode(code: SurfaceCode, name: str, config: BcConfig) -> Callable:
    """(sorted defect int64 array, side) -> iterable of correction qubits."""
    if name == "bc":
        decoder = BubbleDecoder(code, config)
        out = decoder.out_row
        kernel = decoder.bound_kernel()

        def decode(defects, side):
            count = kernel(defects, 1 if side is Side.DUAL else 0)
            if count < 0:
                raise RuntimeError("decoder internal contract violated")
            return out[:count]

        return decode
    if name == "greedy":
        return lambda defects, side: greedy_decode(
            code, Syndrome(tuple(defects.tolist()), side)
        )
    if name == "mwpm":
        return lambda defects, side: mwpm_decode(
            code, Syndrome(tuple(defects.tolist()), side)
        )
    raise ValueError(f"unknown decoder {name!r}")


def _decode_one_side(tables, decode, flip_idx, side, stats):
    """Decode one side of one shot; returns True on a logical failure."""
    sites: set[int] = set()
    flips = tables.flips
    for q in flip_idx:
        sites ^= flips[q]
    err_parity = int(tables.logical_mask[flip_idx].sum()) & 1
    if not sites:
        return bool(err_parity)
    defects = np.fromiter(sorted(sites), dtype=np.int64, count=len(sites))
    t0 = time.perf_counter_ns()
    correction = decode(defects, side)
    stats.latencies_ns.append(time.perf_counter_ns() - t0)
    stats.n_d_sum += len(sites)
    stats.n_d_count += 1
    stats.n_d_max = max(stats.n_d_max, len(sites))
    if not isinstance(correction, np.ndarray):
        correction = np.fromiter(correction, dtype=np.int64, count=len(correction))
    corr_parity = int(tables.logical_mask[correction].sum()) & 1
    return bool(err_parity ^ corr_parity)


class _RowStats:
    __slots__ = ("latencies_ns", "n_d_sum", "n_d_count", "n_d_max")

    def __init__(self):
        self.latencies_ns = []
        self.n_d_sum = 0
        self.n_d_count = 0
        self.n_d_max = 0


def _run_row(spec: ExperimentSpec, index: int, row: tuple[int, float, str]) -> ResultRow:
    d, p, name = row
    code = SurfaceCode(d)
    channel = DepolarizingChannel(p, seed=spec.seed, stream_id=index)
    decode = _make_decode(code, name, spec.config)
    primal = _SideTables(code, Side.PRIMAL)
    dual = _SideTables(code, Side.DUAL)
    both_sides = spec.side_policy == "both"
    stats = _RowStats()
    shots = 0
    errors = 0
    while errors < spec.min_logical_errors and shots < spec.max_shots:
        batch = min(spec.batch_size, spec.max_shots - shots)
        z, x = channel.sample_batch(code, batch)
        shots += batch
        active = z.any(axis=1)
        if both_sides:
            active |= x.any(axis=1)
        for i in np.flatnonzero(active):
            z_idx = np.flatnonzero(z[i])
            fail = False
            if z_idx.size:
                fail = _decode_one_side(primal, decode, z_idx, Side.PRIMAL, stats)
            if both_sides and not fail:
                x_idx = np.flatnonzero(x[i])
                if x_idx.size:
                    fail = _decode_one_side(dual, decode, x_idx, Side.DUAL, stats)
            if fail:
                errors += 1
    lat = np.asarray(stats.latencies_ns, dtype=np.float64) / 1000.0
    return ResultRow(
        d=d,
        p=p,
        decoder=name,
        shots=shots,
        logical_errors=errors,
        truncated=errors < spec.min_logical_errors,
        n_d_mean=stats.n_d_sum / stats.n_d_count if stats.n_d_count else 0.0,
        n_d_max=stats.n_d_max,
        mean_latency_us=float(lat.mean()) if lat.size else 0.0,
        median_latency_us=float(np.median(lat)) if lat.size else 0.0,
    )


def worker_count(num_rows: int) -> int:
    """Worker cap from BUBBLECODE_THREADS (default 1), bounded by the rows."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        workers = int(raw)
    except ValueError as exc:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    return max(1, min(workers, num_rows))


def run_logical_error_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Run every row of the spec; deterministic for any worker count.

    Each row's shots consume one dedicated RNG substream, so splitting rows
    across processes cannot change any number in the output.
    """
    rows = spec.rows()
    workers = worker_count(len(rows))
    if workers <= 1:
        return [_run_row(spec, i, row) for i, row in enumerate(rows)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_row, spec, i, row) for i, row in enumerate(rows)]
        return [f.result() for f in futures]


def _make_timed_decode(code: SurfaceCode, name: str, config: BcConfig) -> Callable:
    """Decode callable with minimal per-call overhead for wall-time measurement.

    For the bubble decoder this is the bound kernel: one call runs the whole
    pipeline including the correction-to-lattice mapping (the correction is
    materialized in the decoder's output buffer)."""
    if name == "bc":
        return BubbleDecoder(code, config).bound_kernel()
    decode = _make_decode(code, name, config)
    return lambda defects, side_dual=0: decode(defects, Side.PRIMAL)


def run_timing_benchmark(
    spec: ExperimentSpec,
    n_d_list: Sequence[int],
    batch_size: int = 1000,
) -> list[TimingRow]:
    """Per-decode wall time over batches of fixed-defect-count syndromes.

    Syndromes draw defect sites uniformly without replacement; a full warmup
    batch is decoded and discarded before measurement.  The exact-matching
    decoder is marked unavailable beyond its capacity instead of timed.
    """
    out = []
    for d in spec.d_list:
        code = SurfaceCode(d)
        rng = np.random.default_rng((spec.seed, d))
        for name in spec.decoders:
            decode = _make_timed_decode(code, name, spec.config)
            for n_d in n_d_list:
                if n_d > code.num_defect_sites:
                    raise ValueError(
                        f"n_d={n_d} exceeds the {code.num_defect_sites} defect "
                        f"sites of d={d}"
                    )
                syndromes = [
                    np.sort(
                        rng.choice(code.num_defect_sites, size=n_d, replace=False)
                    ).astype(np.int64)
                    for _ in range(2 * batch_size)
                ]
                try:
                    for s in syndromes[:batch_size]:  # warmup, discarded
                        decode(s)
                    times = np.empty(batch_size, dtype=np.float64)
                    clock = time.perf_counter_ns
                    for j, s in enumerate(syndromes[batch_size:]):
                        t0 = clock()
                        decode(s)
                        times[j] = clock() - t0
                except CapacityError:
                    out.append(
                        TimingRow(d, n_d, name, batch_size, False, math.nan, math.nan, math.nan)
                    )
                    continue
                times /= 1000.0
                out.append(
                    TimingRow(
                        d, n_d, name, batch_size, True,
                        float(times.mean()),
                        float(np.percentile(times, 50)),
                        float(np.percentile(times, 99)),
                    )
                )
    return out


# ----- serialization ---------------------------------------------------------


def _result_record(row: ResultRow, include_latency: bool) -> dict:
    lo, hi = row.wilson
    rec = {
        "d": row.d,
        "p": row.p,
        "decoder": row.decoder,
        "shots": row.shots,
        "logical_errors": row.logical_errors,
        "p_l": row.p_l,
        "wilson_low": lo,
        "wilson_high": hi,
        "truncated": row.truncated,
        "n_d_mean": row.n_d_mean,
        "n_d_max": row.n_d_max,
    }
    if include_latency:
        rec["mean_latency_us"] = row.mean_latency_us
        rec["median_latency_us"] = row.median_latency_us
    return rec


def _timing_record(row: TimingRow) -> dict:
    return {col: getattr(row, col) for col in TIMING_COLUMNS}


def _write_csv(records: list[dict], columns: Sequence[str], schema: str) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {schema}\n")
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow(rec)
    return buf.getvalue()


def results_to_csv(rows: Sequence[ResultRow], include_latency: bool = False) -> str:
    """Versioned CSV; latency columns are opt-in because they are measurement
    noise and would break byte-for-byte replay."""
    cols = RESULT_COLUMNS + (LATENCY_COLUMNS if include_latency else ())
    return _write_csv([_result_record(r, include_latency) for r in rows], cols, RESULTS_SCHEMA)


def results_to_json(rows: Sequence[ResultRow], include_latency: bool = False) -> str:
    return json.dumps(
        {"schema": RESULTS_SCHEMA, "rows": [_result_record(r, include_latency) for r in rows]},
        indent=2,
        sort_keys=True,
    )


def timings_to_csv(rows: Sequence[TimingRow]) -> str:
    return _write_csv([_timing_record(r) for r in rows], TIMING_COLUMNS, TIMING_SCHEMA)


def timings_to_json(rows: Sequence[TimingRow]) -> str:
    return json.dumps(
        {"schema": TIMING_SCHEMA, "rows": [_timing_record(r) for r in rows]},
        indent=2,
        sort_keys=True,
    )


def spec_from_dict(doc: dict) -> ExperimentSpec:
    """Build a spec from a JSON document (the CLI's --config format)."""
    config = BcConfig(**doc.get("config", {}))
    kwargs = {
        k: v
        for k, v in doc.items()
        if k
        in (
            "min_logical_errors", "max_shots", "seed", "side_policy", "batch_size",
        )
    }
    return ExperimentSpec(
        d_list=tuple(doc["d_list"]),
        p_list=tuple(doc["p_list"]),
        decoders=tuple(doc.get("decoders", ("bc",))),
        config=config,
        **kwargs,
    )
