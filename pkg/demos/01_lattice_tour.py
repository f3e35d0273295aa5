"""Tour of the planar surface-code geometry.

The [[n,1,d]] planar code stores one logical qubit in n = d^2 + (d-1)^2 data
qubits.  Z errors light up X-type generators (the primal defect grid) and X
errors light up Z-type plaquettes (the dual grid, which is the primal grid
transposed).  This script walks through the indexing conventions every other
module builds on.
"""

from bubblecode import Side, SurfaceCode

code = SurfaceCode(5)
print(f"{code}: n={code.n} data qubits, t={code.t}, "
      f"{code.num_defect_sites} defect sites per side")

# Horizontal qubits come first (row-major), then vertical qubits.
print("\nqubit 7  ->", code.qubit_position(7))
print("qubit 30 ->", code.qubit_position(30))

# Defect sites live on a d x (d-1) grid, row-major.
s = code.defect_index(2, 1)
print(f"\ndefect site {s} sits at grid {code.defect_coords(s)}")
print("distance to site (0,3):", code.eval_d(s, code.defect_index(0, 3)))
print("boundary distances:", {w: code.boundary_distance(s, w) for w in ("left", "right")})

# A single bulk Z error flips two generators; boundary-column qubits flip one.
bulk = code.horizontal_qubit(2, 2)
edgeq = code.horizontal_qubit(2, 0)
print(f"\nsyndrome of bulk error on qubit {bulk}: ",
      code.syndrome_of([bulk], Side.PRIMAL).defects)
print(f"syndrome of boundary error on qubit {edgeq}:",
      code.syndrome_of([edgeq], Side.PRIMAL).defects)

# Logical operators are boundary-to-boundary paths of weight d.
print("\nZ_L representative:", sorted(code.z_logical))
print("X_L representative:", sorted(code.x_logical))
print("Z_L columns:", sorted(code.column_of(q) for q in code.z_logical))

# Applying Z_L leaves no syndrome but anticommutes with X_L: a logical error.
print("\nZ_L syndrome is empty:", code.syndrome_of(code.z_logical, Side.PRIMAL).defects == ())
print("Z_L is a logical failure:", code.is_logical_failure(code.z_logical, Side.PRIMAL))
