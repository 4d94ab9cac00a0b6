"""The operator T'_d over the relation ring O."""

from wittkit.kummer import d_vector, tprime_d
from wittkit.ring import PolyRing

O = PolyRing.O(2)
t = tprime_d(d_vector(O, O.var("L"), 2, 4), R=4)
print("back-substitution matrix (first rows):")
for row in t.to_json(O)["matrix"][:3]:
    print(" ", row)
print("specialization kills alpha_n:", t.specialization_ok)
print("ghost intertwining:", t.intertwining_ok)
print("Witt lift integral:", t.lift_integral)
