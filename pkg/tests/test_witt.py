import pytest
from hypothesis import given, settings, strategies as st

from wittkit.ring import ZZ, EisensteinRing, NotIntegral, PolyRing
from wittkit.witt import (
    TruncationClass, WittVector, f_lambda, frobenius, ghost, ghost_lift, ghost_polynomials, in_truncation_class,
    integer_vector, kernel, module_structure, support_probe, t_map, t_map_by_sum, teichmuller, verschiebung,
    witt_add, witt_mul, witt_neg, witt_sub,
)


def sym(names):
    A = PolyRing(names)
    return A, A.gens()


def test_ghost_single_coordinate():
    A, (x0,) = sym(["x0"])
    g = ghost(WittVector(A, 2, [x0]), 1)
    assert list(g.values) == [x0, x0 ** 2]


def test_ghost_of_teichmuller_and_verschiebung():
    A, (a, b) = sym(["a", "b"])
    g = ghost(teichmuller(a, 3, A), 3)
    assert list(g.values) == [a, a ** 3, a ** 9, a ** 27]
    x = WittVector(A, 2, [a, b])
    gv = ghost(verschiebung(x), 3).values
    gx = ghost(x, 2).values
    assert gv[0] == A.zero
    assert all(gv[r] == gx[r - 1] * 2 for r in range(1, 4))


def test_ghost_lift_not_integral():
    with pytest.raises(NotIntegral):
        ghost_lift([1, 2], 2, ZZ)


def test_low_kernel_polynomials():
    k = kernel(2, 1)
    X0, X1, Y0, Y1 = (k.ring.var(v) for v in ("X0", "X1", "Y0", "Y1"))
    assert k.S[0] == X0 + Y0
    assert k.S[1] == X1 + Y1 - X0 * Y0
    assert k.P[0] == X0 * Y0
    assert k.F[0] == X0 ** 2 + X1 * 2


@pytest.mark.parametrize("p", [2, 3])
def test_kernel_ghost_identities(p):
    R = 3
    k = kernel(p, R)
    A = k.ring
    phx = ghost_polynomials(p, R + 1, A, "X")
    phy = ghost_polynomials(p, R + 1, A, "Y")
    ys = [A.var(f"Y{i}") for i in range(R + 1)]
    for r in range(R + 1):
        for polys, target in ((k.S, phx[r] + phy[r]), (k.P, phx[r] * phy[r]), (k.F, phx[r + 1]), (k.N, -phx[r])):
            g = ghost_polynomials(p, r, A, "X")[r].evaluate({f"X{i}": polys[i] for i in range(r + 1)}, A)
            assert g == target
        t = ghost_polynomials(p, r, A, "X")[r].evaluate({f"X{i}": k.T[i] for i in range(r + 1)}, A)
        assert t == sum((ys[i] ** (p ** (r - i)) * phx[r - i] * p ** i for i in range(r + 1)), A.zero)
    for name in "SPFNT":
        for f in getattr(k, name):
            assert all(isinstance(c, int) for c in f.terms.values())


def test_add_mul_examples():
    A, (a, b) = sym(["a", "b"])
    s = witt_add(WittVector(A, 2, [a]), WittVector(A, 2, [b]), 2)
    assert s.padded(2) == [a + b, -(a * b)]
    x = WittVector(A, 2, [a, b])
    assert witt_add(x, WittVector(A, 2, [])).equals(x)
    m = witt_mul(teichmuller(a, 2, A), teichmuller(b, 2, A), 3)
    assert m.padded(3) == [a * b, A.zero, A.zero]


def test_frobenius_and_verschiebung():
    A, (a, b) = sym(["a", "b"])
    assert verschiebung(WittVector(A, 2, [a, b])).padded(3) == [A.zero, a, b]
    assert frobenius(teichmuller(a, 3, A)).padded(2) == [a ** 3, A.zero]
    assert teichmuller(1, 2).padded(3) == [1, 0, 0]


def test_t_map_examples():
    A, (c,) = sym(["c"])
    a = WittVector(A, 2, [A.zero, A.one])
    assert t_map(a, WittVector(A, 2, [c]), 3).padded(2) == [A.zero, c]
    assert t_map(WittVector(A, 2, []), WittVector(A, 2, [c])).is_zero()


def test_f_lambda_example():
    A, (c, L) = sym(["c", "L"])
    y = f_lambda(WittVector(A, 2, [c]), L, 3)
    assert y.padded(1) == [c ** 2 - L * c]
    assert f_lambda(WittVector(A, 2, []), L).is_zero()


def test_module_structure():
    s0, p0 = module_structure(0, 2)
    A = s0.ring
    assert s0 == A.var("u0") + A.var("v0")
    assert p0 == A.var("L") * A.var("a0") * A.var("u0")
    s1, _ = module_structure(1, 2)
    B = s1.ring
    assert s1 == B.var("u1") + B.var("v1") - B.var("L") * B.var("u0") * B.var("v0")


@pytest.mark.parametrize("p", [2, 3])
def test_module_structure_divisible(p):
    for r in range(4):
        module_structure(r, p)  # raises NotDivisible otherwise


def test_integer_vectors():
    assert integer_vector(2, 2, depth=4).padded(4) == [2, -1, -4, -40]
    assert integer_vector(3, 3, depth=3).padded(3) == [3, -8, -2016]


def test_truncation_classes(R2):
    pi = R2.pi
    assert in_truncation_class(WittVector(R2, 2, []), TruncationClass(1, 1, pi))
    assert in_truncation_class(WittVector(R2, 2, [pi, pi]), TruncationClass(2, 2, R2.coerce(2)))
    assert not in_truncation_class(WittVector(R2, 2, [1]), TruncationClass(2, 2, pi))


def test_support_probe():
    assert support_probe("add", 1, 1, 2) == (1, 1)
    assert support_probe("f_lambda", 1, 1, 2) == (1, 1)
    m, n = support_probe("add", 1, 2, 2)
    assert m >= 1 and n >= 1


def test_eisenstein_certified_exact(R2):
    pi = R2.pi
    y = f_lambda(WittVector(R2, 2, [pi, pi ** 2]), pi)
    assert y.is_exact()


def test_horizon_guard():
    w = WittVector(ZZ, 2, [1, 2], horizon=2)
    with pytest.raises(IndexError):
        w[3]


ints = st.lists(st.integers(-20, 20), min_size=1, max_size=3)


@settings(max_examples=40, deadline=None)
@given(ints, ints)
def test_ghost_is_ring_homomorphism(xs, ys):
    x, y = WittVector(ZZ, 2, xs), WittVector(ZZ, 2, ys)
    n = 3
    gx, gy = ghost(x, n - 1).values, ghost(y, n - 1).values
    assert list(ghost(witt_add(x, y, n), n - 1).values) == [a + b for a, b in zip(gx, gy)]
    assert list(ghost(witt_mul(x, y, n), n - 1).values) == [a * b for a, b in zip(gx, gy)]
    assert list(ghost(witt_sub(x, y, n), n - 1).values) == [a - b for a, b in zip(gx, gy)]
    assert witt_add(x, witt_neg(x, n), n).is_zero()


@settings(max_examples=30, deadline=None)
@given(ints, ints)
def test_t_map_agrees_with_sum(a, x):
    av, xv = WittVector(ZZ, 3, a), WittVector(ZZ, 3, x)
    assert t_map(av, xv, 3).equals(t_map_by_sum(av, xv, 3), 3)
