"""Compare the bubble decoder against the exact matching oracle and the
nearest-pair baseline on the fraction of fixed-weight errors each corrects.

At d=5 the weight-3 class (t+1) governs the low-p logical error rate; the
bubble decoder sits within a few parts per thousand of the exact
minimum-weight matcher while the greedy baseline trails by ~7%.
"""

from bubblecode import BubbleDecoder, SurfaceCode, beta_fraction, greedy_decode, mwpm_decode
from bubblecode.bc import decode_side
from bubblecode.reference import decoder_corrects

code = SurfaceCode(5)
fast = BubbleDecoder(code)
decoders = {
    "greedy": greedy_decode,
    "bc": lambda c, s: fast.decode_set(s.defects, s.side),
    "mwpm-oracle": mwpm_decode,
}

print(f"fraction of weight-3 Z errors corrected on {code} "
      f"(exhaustive, C(41,3)=10660 patterns):")
for name, fn in decoders.items():
    result = beta_fraction(code, fn, w=3)
    lo, hi = result.interval
    print(f"  {name:12s} beta = {result.beta:.6f}   [{lo:.6f}, {hi:.6f}]")

# two weight-4 patterns on d=7 with qualitatively different outcomes
code7 = SurfaceCode(7)
spread = frozenset({18, 36, 41, 63})   # three well-separated error pieces
onecluster = frozenset({24, 29, 34, 77})  # a single seven-defect cluster
for label, error in (("spread pieces", spread), ("one big cluster", onecluster)):
    bc_ok = decoder_corrects(code7, decode_side, error)
    gr_ok = decoder_corrects(code7, greedy_decode, error)
    print(f"\nd=7 weight-4 pattern ({label}): qubits {sorted(error)}")
    print(f"  bubble decoder corrects: {bc_ok};  nearest-pair baseline corrects: {gr_ok}")
