"""Kummer data: the Witt expansion of p, d-vectors, and dimension-one isogenies."""

from wittkit.kummer import big_frame_search, d_vector, init_isogeny, kernel_count, kummer_dim1, p_witt_expansion
from wittkit.ring import EisensteinRing, PolyRing

print("2 in W(Z):", p_witt_expansion(2, 4).components)
O = PolyRing.O(2)
print("d-vector over O:", [str(c) for c in d_vector(O, O.var("L"), 2, 3).coords])

R = EisensteinRing(2, 2, 12)
print("psi for lambda = pi:", kummer_dim1(R.pi, R, 2).generator)
pair = init_isogeny(2, R, R.pi)
print("R-points in the kernel of psi:", kernel_count(pair)["points"])

# the step 1 -> 2 with lambda_1 = 2, lambda_2 = pi has witnesses when c uses lambda_1
pair = init_isogeny(2, R, R.pi ** 2)
res = big_frame_search(pair, R.pi, [0, 1, "pi"], depth=2, enlarge=False, samples=5, c_convention="previous")
print("agreement:", res["agreement"], " positives:", len(res["positives"]))
