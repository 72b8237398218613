"""Walk through one variety end to end: grading, cone types, tropical
fan, anticanonical complex and the singularity verdict.

Run with:  python demos/running_example.py
"""

from arrvar.anticanon import anticanonical_complex, singularity_type
from arrvar.coxdata import ExponentData, build_ring
from arrvar.tropical import classify_cones, elementary_cones, tropical_data
from arrvar.varietycore import VarietyData, is_fano, smoothness_report

# Five lines in P^2 given as the columns of A; the first block carries
# two variables with exponent 1, the others one variable with exponent 2.
A = [[1, 0, 0, 1, 1], [0, 1, 0, 1, 0], [0, 0, 1, 0, 1]]
exponents = ExponentData(((1, 1), (2,), (2,), (2,), (2,)), 1)
ring = build_ring(A, exponents, [[-2, -3, 1, 1, 1, 1, 1]])

G = ring.grading
print("class group: rank", G.rank, "torsion", G.torsion)
print("ring dimension", ring.dim, "complexity", ring.complexity)

# The fan is given by its maximal cones, as lists of variable indices.
cones = [[1, 2, 3, 4, 5], [0, 3, 5, 6], [0, 2, 4, 6], [0, 1, 3, 5], [0, 1, 2, 4],
         [4, 5, 6], [3, 4, 6], [2, 5, 6], [2, 3, 6]]
v = VarietyData(ring, cones)
print("variety dimension", v.dim)
print("smoothness:", smoothness_report(v).status)
print("Fano:", is_fano(v))

# Each maximal cone is big, special or a leaf relative to trop(X).
for gens, kind in sorted(classify_cones(v).items(), key=lambda kv: sorted(kv[0])):
    print(f"  cone {sorted(gens)}: {kind}")

trop = tropical_data(v)
print("maximal cones of the tropical fan:", len(trop.base_cones))

# Elementary cones contribute the new rays of the refinement.
for e in elementary_cones(v):
    print(f"  elementary cone {sorted(e.generators)} -> ray {e.ray}")

ac = anticanonical_complex(v)
print("bounded anticanonical complex:", ac.bounded)
print("vertices:", [tuple(str(x) for x in p) for p in ac.vertices()])
print("singularities:", singularity_type(v))
