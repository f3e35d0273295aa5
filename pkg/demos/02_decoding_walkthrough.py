"""Step-by-step bubble-clustering decode of one instructive error pattern.

The pattern is a weight-4 Z error on the d=7 code whose defects, swept in scan
order, first build a star-shaped tree.  Star avoidance rebuilds it into a
chain, the first peeling finds a weight-4 matching (exactly the true error),
and post-processing keeps it because its weight equals t+1.
"""

from bubblecode import (
    BcConfig,
    SurfaceCode,
    add_ghost,
    bubble_cluster,
    bubble_radius,
    decode_side_detailed,
    peel,
    post_process,
)
from bubblecode.lattice import Side

code = SurfaceCode(7)
error = frozenset({14, 15, 24, 76})  # (2,0)h (2,1)h (3,3)h (4,3)v
print("true error:", sorted(error))

syndrome = code.syndrome_of(error, Side.PRIMAL)
print("defects:", [code.defect_coords(s) for s in syndrome.defects])

radius = bubble_radius(code.t, len(syndrome.defects))
print(f"\nn_d={len(syndrome.defects)} -> bubble radius {radius}")

plain = bubble_cluster(code, syndrome, radius, BcConfig(enable_star_avoidance=False))
print("tree without star avoidance (positions):", sorted(map(tuple, plain.edges())))
print("  defect orders:", plain.order, " <- position 1 is a star")

state = bubble_cluster(code, syndrome, radius)
print("tree with star avoidance:           ", sorted(map(tuple, state.edges())))

ghosts = add_ghost(code, state, 1, phase=1)
print("\nodd cluster -> ghost attachment:", ghosts,
      "(defect", code.defect_coords(syndrome.defects[ghosts[0][0]]), "to the", ghosts[0][1], "boundary)")

m1 = peel(code, state, 1, ghosts)
print(f"first matching: weight {m1.weight}, qubits {sorted(m1.qubit_set)}")

chosen = post_process(code, code.t, state, 1, m1)
print(f"post-processing keeps weight {chosen.weight} (w1 = t+1 rule)")
print("matching equals the true error:", chosen.qubit_set == error)

# the one-call interface reports the same decision
correction, diag = decode_side_detailed(code, syndrome)
print("\ndecode_side_detailed diagnostics:", diag["clusters"][0])
residual = error ^ correction
print("residual empty:", not residual)
