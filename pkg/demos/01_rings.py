"""Coefficient rings: exact integers, the relation ring O and an Eisenstein ring."""

from wittkit.ring import EisensteinRing, PolyRing

# O = Z[C, L]/(2 - C L): the universal ring where L divides 2
O = PolyRing.O(2)
C, L = O.var("C"), O.var("L")
print("In O, C*L reduces to", C * L)
print("(2*L + L^3) / L =", (L * 2 + L ** 3).exact_div(L))

# Z_2[pi]/(pi^2 - 2), known modulo 2^12
R = EisensteinRing(2, 2, 12)
pi = R.pi
print("pi^2 =", pi ** 2)
x = R.parse("1 + pi")
print("(1+pi)^-1 =", R.exact_div(R.one, x))
print("2/pi^2 keeps track of lost precision:", R.exact_div(R.coerce(2), pi ** 2))
