"""Decode-time scaling with the number of defects.

The clustering sweep dominates the decoder, so the mean decode time grows at
most quadratically in the defect count; doubling n_d should cost at most ~4x.
Batches of 1000 fixed-n_d syndromes, warmup batch discarded, wall time
measured around the decode call only.
"""

from bubblecode import ExperimentSpec
from bubblecode.harness import run_timing_benchmark, timings_to_csv

spec = ExperimentSpec(d_list=(7, 11), p_list=(1e-2,), decoders=("bc",), seed=0)
rows = run_timing_benchmark(spec, n_d_list=(4, 8, 16, 32), batch_size=1000)

print(timings_to_csv(rows))

for d in spec.d_list:
    sub = [r for r in rows if r.d == d]
    means = [r.mean_us for r in sub]
    ratios = [f"{b / a:.2f}" for a, b in zip(means, means[1:])]
    print(f"d={d}: means {[f'{m:.2f}us' for m in means]}, doubling ratios {ratios}")

print("\nthe exact matching oracle at the same defect counts (for contrast):")
oracle = ExperimentSpec(d_list=(11,), p_list=(1e-2,), decoders=("mwpm",), seed=0)
for row in run_timing_benchmark(oracle, n_d_list=(4, 8), batch_size=50):
    print(f"  mwpm-oracle d={row.d} n_d={row.n_d}: mean {row.mean_us:.1f}us")
