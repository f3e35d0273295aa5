"""Small Monte Carlo sweep of logical error rate vs physical error rate.

Full depolarizing noise, both decoding sides, stop rule of 60 logical errors
per point (the library default is 100; trimmed here so the demo finishes in
seconds).  Below threshold the d=5 curve drops under the d=3 curve and the
log-log slopes approach t+1.
"""

import numpy as np

from bubblecode import ExperimentSpec
from bubblecode.harness import results_to_csv, run_logical_error_experiment

spec = ExperimentSpec(
    d_list=(3, 5),
    p_list=(3e-3, 6e-3, 1.2e-2),
    decoders=("bc",),
    min_logical_errors=60,
    max_shots=5_000_000,
    seed=11,
)
rows = run_logical_error_experiment(spec)

print(results_to_csv(rows))

for d in spec.d_list:
    sub = [r for r in rows if r.d == d]
    ps = np.array([r.p for r in sub])
    pls = np.array([r.p_l for r in sub])
    slope = np.polyfit(np.log(ps), np.log(pls), 1)[0]
    print(f"d={d}: fitted log-log slope {slope:.2f} (asymptote t+1 = {(d - 1) // 2 + 1})")

low_p = {r.d: r.p_l for r in rows if r.p == spec.p_list[0]}
print(f"\nat p={spec.p_list[0]}: p_L(d=5)={low_p[5]:.2e} < p_L(d=3)={low_p[3]:.2e}:",
      low_p[5] < low_p[3])
