"""Witt vector arithmetic and the ghost map."""

from wittkit.ring import PolyRing, ZZ
from wittkit.witt import WittVector, f_lambda, ghost, integer_vector, kernel, t_map, witt_add, witt_mul

k = kernel(2, 2)
print("S_1 =", k.S[1])
print("P_1 =", k.P[1])

# 2 as a Witt vector over Z: its ghost components are all 2
two = integer_vector(2, 2, ZZ, 4)
print("2 in W(Z) =", two, " ghost:", list(ghost(two, 3).values))

A = PolyRing(["a", "b"])
a, b = A.gens()
x = WittVector(A, 2, [a, b])
print("x + x =", witt_add(x, x, 2))
print("x * x =", witt_mul(x, x, 2))
print("F^lambda(x) with lambda = 1:", f_lambda(x, A.one, 1))
print("T_(1) x =", t_map(WittVector(A, 2, [A.one]), x, 1))
