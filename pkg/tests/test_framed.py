import pytest

from wittkit.framed import (
    InvalidLambda, TruncationTooCoarse, check_frame, extend_tower, frame_search, init_tower, verify_group_axioms,
)
from wittkit.ring import LocalRing, PolyRing, ZZ
from wittkit.witt import WittVector


@pytest.fixture(scope="module")
def tower2(R2):
    s = init_tower(2, R2, R2.pi)
    frames = frame_search(s, R2.pi, [0, 1, "pi", 2], depth=2)
    fr = next(f for f in frames if len(f.a[0].coords) == 2 and str(f.a[0]) == "W(0, pi)")
    return s, frames, extend_tower(s, fr, R2.pi, levels=[(2, 2, 2)])


def test_dimension_one_laws(R2):
    assert str(init_tower(2, R2, R2.pi).law_symbolic()[0]) == "pi*X1*Y1 + X1 + Y1"
    assert str(init_tower(2, R2, 1).law_symbolic()[0]) == "X1*Y1 + X1 + Y1"
    A = PolyRing(["L"], LocalRing(2), p=2)
    s = init_tower(2, A, A.zero, mode="formal")
    assert str(s.law_symbolic()[0]) == "X1 + Y1"


def test_zero_lambda_rejected(R2):
    with pytest.raises(InvalidLambda):
        init_tower(2, R2, 0)
    with pytest.raises(InvalidLambda):
        init_tower(3, ZZ, 0)


def test_frame_search_count(tower2):
    _, frames, _ = tower2
    assert len(frames) == 9
    # 1 is a unit, so no frame can start with it
    assert all(str(f.a[0]).split(",")[0] not in ("W(1", "W(1)") for f in frames)


def test_zero_frame_gives_product_law(R2):
    s = init_tower(2, R2, R2.pi)
    fr = check_frame(s, [WittVector(R2, 2, [])], R2.pi)
    t = extend_tower(s, fr, R2.pi, levels=[(2, 1, 1)])
    law = t.law_symbolic()
    assert str(law[1]) == "pi*X2*Y2 + X2 + Y2"
    assert t.levels[0].K.is_zero()


def test_extension_nontrivial(tower2, R2):
    _, _, t = tower2
    assert t.n == 2
    assert not t.levels[0].K.is_zero()
    pi = R2.pi
    X1 = t.X(1)
    expected = X1 ** 4 * (2 - 2 * pi) + X1 ** 2 * pi + 1
    assert (t.D(1) - expected).vanishes()


def test_axioms(tower2):
    _, _, t = tower2
    rep = verify_group_axioms(t, samples=20, seed=1)
    assert rep["ok"], rep["violations"]
    assert set(rep["passed"]) >= {"associativity", "unit", "inverse", "commutativity", "alpha_homomorphism"}


def test_inverse_pointwise(tower2, R2):
    _, _, t = tower2
    P = [R2.pi * 3, R2.pi ** 2 + 2]
    Q = t.inverse(P)
    assert all(R2.is_zero(c) for c in t.law(P, Q))


def test_frame_relation_enforced(R2):
    s = init_tower(2, R2, R2.pi)
    bad = check_frame(s, [WittVector(R2, 2, [1])], R2.pi)
    assert bad is None


def test_coarse_truncation_detected(R2):
    s = init_tower(2, R2, R2.pi)
    fr = check_frame(s, [WittVector(R2, 2, [2, 2])], R2.pi)
    with pytest.raises((TruncationTooCoarse, ValueError)):
        extend_tower(s, fr, R2.pi, levels=[(1, 1, 1)])


@pytest.fixture(scope="module")
def formal():
    A = PolyRing(["L1", "L2", "t"], LocalRing(2), p=2)
    L1, L2, t = A.gens()
    s = init_tower(2, A, L1, mode="formal", max_dim=2, degree_cap=6)
    fr = check_frame(s, [WittVector(A, 2, [(1 + L2 * t) * L1])], L2)
    assert fr is not None
    return A, extend_tower(s, fr, L2)


def test_formal_dictionary(formal):
    A, t = formal
    lev = t.levels[0]
    assert lev.H is not None and not lev.H.is_zero()
    star = t.law_symbolic(1)
    PR = t.poly_ring
    Dstar = lev.D.evaluate({"X1": star[0]}, PR)
    diff = lev.K - Dstar * lev.H
    assert all(sum(e) > t.degree_cap for e in diff.terms)


def test_formal_lowest_term(formal):
    A, t = formal
    H = t.levels[0].H
    low = min(sum(e) for e in H.terms)
    lowest = {e: c for e, c in H.terms.items() if sum(e) == low}
    assert len(lowest) == 1
    (c,) = lowest.values()
    L1, L2, tt = A.gens()
    # modulo L2 the lowest coefficient is -L1^2 t
    assert c.subs({"L2": A.zero}) == -(L1 ** 2) * tt


def test_formal_law_associative(formal):
    _, t = formal
    PR = t.poly_ring
    cap = t.degree_cap
    law = t.law_symbolic()
    names = ["X1", "X2", "Y1", "Y2"]
    Z = PolyRing(names + ["Z1", "Z2"], PR.coeffs, p=2)
    Xs = [Z.var("X1"), Z.var("X2")]
    Ys = [Z.var("Y1"), Z.var("Y2")]
    Zs = [Z.var("Z1"), Z.var("Z2")]

    def op(P, Q):
        sub = {"X1": P[0], "X2": P[1], "Y1": Q[0], "Y2": Q[1]}
        return [f.evaluate(sub, Z) for f in law]

    def trunc(v):
        return [{e: c for e, c in f.terms.items() if sum(e) <= cap // 2} for f in v]

    assert trunc(op(op(Xs, Ys), Zs)) == trunc(op(Xs, op(Ys, Zs)))
