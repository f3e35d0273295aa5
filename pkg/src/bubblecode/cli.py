"""Command-line interface: describe, decode, verify, simulate, bench.

All outputs are deterministic given --seed (timing measurements excluded by
design: latency columns never appear in simulate/verify output).  Exit codes:
0 success, 1 a verification suite failed, 2 configuration/usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from ._kernels import BubbleDecoder
from .bc import BcConfig, decode_side_detailed
from .harness import (
    ExperimentSpec,
    results_to_csv,
    results_to_json,
    run_logical_error_experiment,
    run_timing_benchmark,
    spec_from_dict,
    timings_to_csv,
    timings_to_json,
)
from .lattice import Side, SurfaceCode, Syndrome
from .reference import (
    CapacityError,
    beta_fraction,
    multi_cluster_suite,
    greedy_decode,
    mwpm_decode,
    distance_preservation_exhaustive,
    distance_preservation_randomized,
)

DECODE_SCHEMA = "bubblecode-decode/1"
BETA_SCHEMA = "bubblecode-beta/1"


def _distance(text: str) -> int:
    value = int(text)
    if value < 3:
        raise argparse.ArgumentTypeError(f"code distance must be >= 3, got {value}")
    return value


def _rate(text: str) -> float:
    value = float(text)
    if not 0.0 <= value < 1.0:
        raise argparse.ArgumentTypeError(f"physical error rate must be in [0,1), got {value}")
    return value


def _parse_config(text: Optional[str]) -> BcConfig:
    if not text:
        return BcConfig()
    doc = json.loads(text)
    return BcConfig(**doc)


def _emit(text: str, out: Optional[str]):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _cmd_describe(args) -> int:
    code = SurfaceCode(args.d)
    _emit(json.dumps(code.describe(), indent=2, sort_keys=True), args.out)
    return 0


def _cmd_decode(args) -> int:
    doc = json.load(sys.stdin)
    d = int(doc["d"])
    if d < 3:
        raise ValueError(f"code distance must be >= 3, got {d}")
    side = Side(doc.get("side", "primal"))
    defects = tuple(int(s) for s in doc.get("defects", ()))
    code = SurfaceCode(d)
    for s in defects:
        if not 0 <= s < code.num_defect_sites:
            raise ValueError(f"defect index {s} out of range")
    config = _parse_config(args.config)
    correction, diag = decode_side_detailed(code, Syndrome(defects, side), config)
    payload = {
        "schema": DECODE_SCHEMA,
        "d": d,
        "side": side.value,
        "correction": sorted(correction),
        "diagnostics": diag,
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return 0


def _bc_decoder_fn(config: BcConfig):
    decoders: dict[int, BubbleDecoder] = {}

    def decode(code, syndrome):
        dec = decoders.get(code.d)
        if dec is None:
            dec = decoders[code.d] = BubbleDecoder(code, config)
        return dec.decode_set(syndrome.defects, syndrome.side)

    return decode


def _cmd_verify(args) -> int:
    config = _parse_config(args.config)
    bc = _bc_decoder_fn(config)
    named = [("bc", bc), ("greedy", greedy_decode), ("mwpm", mwpm_decode)]
    report_lines = []
    beta_rows = []
    failed = False
    for d in args.d:
        code = SurfaceCode(d)
        suites = []
        if d <= 5:
            max_w = code.t if d > 3 else 1
            suites.append(distance_preservation_exhaustive(code, bc, max_w, Side.PRIMAL))
            if d == 3:
                suites.append(distance_preservation_exhaustive(code, bc, max_w, Side.DUAL))
        else:
            suites.append(
                distance_preservation_randomized(
                    code, bc, code.t, args.patterns, Side.PRIMAL, seed=args.seed
                )
            )
        # at d=3 three clusters of a weight-3 pattern are all but unconstructible
        # on the 3x2 defect grid; the suite caps ell accordingly
        for ell in (1, 2) if d == 3 else (1, 2, 3):
            suites.append(
                multi_cluster_suite(
                    code, ell, args.multicluster_patterns,
                    seed=args.seed, config=config, decoder=bc,
                )
            )
        for suite in suites:
            report_lines.append(suite.line())
            failed |= not suite.passed
        w = code.t + 1
        import math

        budget = (
            "exhaustive" if math.comb(code.n, w) <= 200_000 else args.beta_samples
        )
        for name, decoder in named:
            try:
                result = beta_fraction(code, decoder, w, budget, seed=args.seed)
            except CapacityError:
                continue
            lo, hi = result.interval
            beta_rows.append(
                {
                    "d": d,
                    "w": w,
                    "decoder": name,
                    "beta": result.beta,
                    "ci_low": lo,
                    "ci_high": hi,
                    "patterns": result.patterns,
                }
            )
            report_lines.append(
                f"INFO beta d={d} w={w} {name}: {result.beta:.6f} "
                f"[{lo:.6f}, {hi:.6f}] over {result.patterns} patterns"
            )
    header = "d,w,decoder,beta,ci_low,ci_high,patterns"
    csv_lines = [f"# schema: {BETA_SCHEMA}", header]
    for row in beta_rows:
        csv_lines.append(
            f"{row['d']},{row['w']},{row['decoder']},{row['beta']},"
            f"{row['ci_low']},{row['ci_high']},{row['patterns']}"
        )
    if args.format == "json":
        payload = {
            "schema": BETA_SCHEMA,
            "report": report_lines,
            "beta": beta_rows,
            "passed": not failed,
        }
        _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
    else:
        print("\n".join(report_lines))
        _emit("\n".join(csv_lines) + "\n", args.out)
    return 1 if failed else 0


def _cmd_simulate(args) -> int:
    if args.spec:
        with open(args.spec) as fh:
            spec = spec_from_dict(json.load(fh))
    else:
        if not args.d or not args.p:
            raise ValueError("simulate needs --d and --p (or --spec)")
        spec = ExperimentSpec(
            d_list=tuple(args.d),
            p_list=tuple(args.p),
            decoders=tuple(args.decoder),
            config=_parse_config(args.config),
            min_logical_errors=args.min_errors,
            max_shots=args.max_shots,
            seed=args.seed,
            side_policy=args.side_policy,
        )
    rows = run_logical_error_experiment(spec)
    if args.format == "json":
        _emit(results_to_json(rows, include_latency=args.latency), args.out)
    else:
        _emit(results_to_csv(rows, include_latency=args.latency), args.out)
    return 0


def _cmd_bench(args) -> int:
    spec = ExperimentSpec(
        d_list=tuple(args.d),
        p_list=(0.01,),
        decoders=tuple(args.decoder),
        config=_parse_config(args.config),
        seed=args.seed,
    )
    rows = run_timing_benchmark(spec, tuple(args.nd), batch_size=args.batch)
    if args.format == "json":
        _emit(timings_to_json(rows), args.out)
    else:
        _emit(timings_to_csv(rows), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bubblecode",
        description="Bubble-clustering decoder toolkit for planar surface codes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", help="dump lattice geometry as JSON")
    p.add_argument("--d", type=_distance, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_describe)

    p = sub.add_parser(
        "decode", help="decode one syndrome from stdin JSON {d, side, defects}"
    )
    p.add_argument("--config", help="BcConfig toggles as JSON")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("verify", help="run correction-capability suites")
    p.add_argument("--d", type=_distance, action="append", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--patterns", type=int, default=100_000,
                   help="random patterns for d>=7 distance-preservation")
    p.add_argument("--multicluster-patterns", type=int, default=2_000)
    p.add_argument("--beta-samples", type=int, default=20_000,
                   help="sampled beta patterns when exhaustive enumeration is too big")
    p.add_argument("--config", help="BcConfig toggles as JSON")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo logical-error-rate sweep")
    p.add_argument("--d", type=_distance, action="append")
    p.add_argument("--p", type=_rate, action="append")
    p.add_argument("--decoder", action="append", default=None,
                   choices=("bc", "greedy", "mwpm"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--max-shots", type=int, default=10**8)
    p.add_argument("--side-policy", choices=("both", "z"), default="both")
    p.add_argument("--config", help="BcConfig toggles as JSON")
    p.add_argument("--spec", help="full experiment spec as a JSON file")
    p.add_argument("--latency", action="store_true",
                   help="include latency columns (breaks byte-for-byte replay)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bench", help="decode-time benchmark at fixed defect counts")
    p.add_argument("--d", type=_distance, action="append", required=True)
    p.add_argument("--nd", type=int, action="append", required=True)
    p.add_argument("--decoder", action="append", default=None,
                   choices=("bc", "greedy", "mwpm"))
    p.add_argument("--batch", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", help="BcConfig toggles as JSON")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "decoder", None) is None and args.command in ("simulate", "bench"):
        args.decoder = ["bc"]
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
