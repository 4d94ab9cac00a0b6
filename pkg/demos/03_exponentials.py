"""Deformed Artin-Hasse exponentials and harmonic factorization."""

from wittkit.exponentials import (
    TruncSeries, TruncationLevel, degree_support_check, ep_single, harmonic_decompose, harmonic_reconstruct,
)
from wittkit.ring import LocalRing, QQ

print("Artin-Hasse, p = 2:", ep_single(1, 0, 6, 2, QQ).coeffs)
print("deformed, U = 1, lambda = 2:", ep_single(1, 2, 6, 2, LocalRing(2)).coeffs)

lv = TruncationLevel(2, 2, 2, 2)
rep = {}
print(f"truncated E_2 at (L,M,N) = (2,2,2) has degree <= B = {lv.B}:", degree_support_check(lv, report=rep))

Z2 = LocalRing(2)
G = TruncSeries(Z2, 6, [1, 1]) * TruncSeries(Z2, 6, [1, 0, 0, 1])
parts = harmonic_decompose(G, 0, 2)
for k, w in sorted(parts.items()):
    if not w.is_zero():
        print(f"  harmonic k={k}: a = {w}")
print("reconstructs:", harmonic_reconstruct(parts, 0, 2, 6, Z2).equals(G))
