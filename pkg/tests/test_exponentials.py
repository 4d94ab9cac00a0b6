import random
from fractions import Fraction

import pytest

from wittkit.exponentials import (
    TruncSeries, TruncationLevel, artin_hasse_oracle, degree_support_check, ep_single, ep_truncated, ep_vector,
    harmonic_decompose, harmonic_reconstruct,
)
from wittkit.ring import LocalRing, PolyRing, QQ
from wittkit.witt import WittVector


def test_zero_gives_one():
    s = ep_single(0, 0, 8, 2, LocalRing(2))
    assert all(c == (1 if k == 0 else 0) for k, c in enumerate(s.coeffs))


@pytest.mark.parametrize("p", [2, 3])
def test_artin_hasse(p):
    s = ep_single(1, 0, 12, p, QQ)
    assert [Fraction(c) for c in s.coeffs] == artin_hasse_oracle(p, 12)


@pytest.mark.parametrize("p", [2, 3])
def test_scaling_identity(p):
    A = PolyRing(["M", "U", "L"], LocalRing(p), p=p)
    M, U, L = A.gens()
    lhs = ep_single(M * U, M * L, 12, p, A)
    rhs = ep_single(U, L, 12, p, A)
    assert all(lhs[k] == rhs[k] * M ** k for k in range(13))


def test_second_coefficient_p2():
    A = PolyRing(["L", "U"], LocalRing(2), p=2)
    L, U = A.gens()
    assert ep_single(U, L, 4, 2, A)[2] == U ** 2 - L * U


def test_vector_factors():
    A = PolyRing(["L", "u", "u1"], LocalRing(2), p=2)
    L, u, u1 = A.gens()
    assert ep_vector(WittVector(A, 2, [u]), L, 6, 2, A).equals(ep_single(u, L, 6, 2, A))
    assert ep_vector(WittVector(A, 2, []), L, 6, 2, A).equals(TruncSeries.one(A, 6))
    s = ep_vector(WittVector(A, 2, [A.zero, u1]), L, 4, 2, A)
    assert s[1] == A.zero and s[2] == u1


def test_bounds():
    assert TruncationLevel(1, 1, 1, 2).B == 0
    assert TruncationLevel(2, 2, 2, 2).B == 4
    assert TruncationLevel(2, 1, 3, 3).B == 3
    s = ep_truncated(WittVector(LocalRing(2), 2, [1]), 1, TruncationLevel(1, 1, 1, 2), LocalRing(2))
    assert s.degree() == 0


@pytest.mark.parametrize("lv", [(2, 2, 2, 2), (2, 1, 1, 1), (3, 2, 1, 2), (2, 1, 2, 2), (3, 1, 1, 3)])
def test_degree_support(lv):
    p, L, M, N = lv
    rep = {}
    assert degree_support_check(TruncationLevel(L, M, N, p), report=rep)
    assert rep["top_degree"] <= rep["B"]


def test_sharpness_probe():
    rep = {}
    degree_support_check(TruncationLevel(2, 2, 2, 2), report=rep)
    assert rep["coefficient_at_B"] != "0"


def test_decompose_known_harmonic():
    Z2 = LocalRing(2)
    G = ep_single(Fraction(3), 1, 8, 2, Z2)
    parts = harmonic_decompose(G, 1, 2)
    assert parts[1].padded(1) == [3]
    assert all(w.is_zero() for k, w in parts.items() if k != 1)


def test_decompose_one_and_product():
    Z2 = LocalRing(2)
    one = TruncSeries.one(Z2, 6)
    assert all(w.is_zero() for w in harmonic_decompose(one, 0, 2).values())
    G = TruncSeries(Z2, 6, [1, 1]) * TruncSeries(Z2, 6, [1, 0, 0, 1])
    parts = harmonic_decompose(G, 0, 2)
    assert not parts[1].is_zero() and not parts[3].is_zero()
    assert harmonic_reconstruct(parts, 0, 2, 6, Z2).equals(G)


@pytest.mark.parametrize("p", [2, 3])
def test_harmonic_round_trip_random(p):
    rng = random.Random(p)
    Zp = LocalRing(p)
    for _ in range(10):
        G = TruncSeries(Zp, 10, [1] + [rng.randrange(-9, 10) for _ in range(10)])
        lam = rng.choice([0, 1, p, 3])
        parts = harmonic_decompose(G, lam, p)
        assert harmonic_reconstruct(parts, lam, p, 10, Zp).equals(G)


def test_multiplicative_in_witt_sum():
    # E(a) E(-a) = 1 since the exponent is additive in ghost components
    from wittkit.witt import witt_neg
    A = PolyRing(["L", "a0", "a1"], LocalRing(2), p=2)
    L, a0, a1 = A.gens()
    a = WittVector(A, 2, [a0, a1])
    prod = ep_vector(a, L, 6, 2, A) * ep_vector(witt_neg(a, 3), L, 6, 2, A)
    assert prod.equals(TruncSeries.one(A, 6))
