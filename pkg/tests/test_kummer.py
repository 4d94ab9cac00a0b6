import pytest

from wittkit.framed import check_frame
from wittkit.kummer import (
    big_frame_check, big_frame_search, d_vector, init_isogeny, kernel_count, kummer_dim1, p_witt_expansion,
    roots_in_ring, tprime_d, upsilon_extend, upsilon_init,
)
from wittkit.ring import EisensteinRing, LocalRing, PolyRing, ZZ
from wittkit.witt import WittVector, t_map_by_sum


def test_p_expansion_p2():
    e = p_witt_expansion(2, 4)
    assert e.components == (2, -1, -4, -40, -4960)
    assert e.pattern_ok


def test_p_expansion_p3():
    e = p_witt_expansion(3, 3)
    assert e.components[:3] == (3, -8, -2016)
    assert e.pattern_ok


def test_expansion_depth_guard():
    with pytest.raises(ValueError):
        p_witt_expansion(2, 50)


def test_d_vector_over_O(O2):
    d = d_vector(O2, O2.var("L"), 2, 4)
    assert [str(c) for c in d.coords] == ["C", "-1", "-4*L^2", "-40*L^6", "-4960*L^14"]


def test_d_vector_eisenstein(R2):
    d = d_vector(R2, R2.pi, 2, 3)
    assert R2.is_zero(d.coords[0] - R2.pi)
    assert R2.is_zero(d.coords[1] + 1)


def test_dim1_generators(O2):
    k = kummer_dim1(O2.var("L"), O2, 2)
    assert k.finite_flat and k.homomorphism_ok
    assert str(k.generator) in ("C*x + x^2", "x^2 + C*x")
    assert str(kummer_dim1(1, ZZ, 2).generator) == "x^2 + 2*x"
    R3 = EisensteinRing(2, 3, 10)
    k3 = kummer_dim1(R3.pi, R3, 2)
    assert k3.finite_flat and k3.homomorphism_ok
    x = k3.generator.ring.var("x")
    assert (k3.generator - x ** 2 - x * R3.pi ** 2).vanishes()
    R = EisensteinRing(3, 2, 10)
    k = kummer_dim1(R.pi, R, 3)
    assert k.finite_flat and k.homomorphism_ok


def test_dim1_not_finite(R2):
    assert str(kummer_dim1(2, ZZ, 2).generator) == "x^2 + x"
    assert not kummer_dim1(4, ZZ, 2).finite_flat
    assert not kummer_dim1(2, ZZ, 3).finite_flat


def test_tprime_over_O(O2):
    d = d_vector(O2, O2.var("L"), 2, 4)
    tab = tprime_d(d, R=4)
    assert all(r.is_zero() for r in tab.remainders)
    assert tab.specialization_ok
    assert all(tab.intertwining_ok)
    assert tab.lift_integral


def test_upsilon_one_is_tmap(R2):
    d = d_vector(R2, R2.pi, 2, 3)
    ups = upsilon_init(d)
    x = WittVector(R2, 2, [R2.pi, 2, 1])
    assert ups.apply([x])[0].equals(t_map_by_sum(d.witt(), x))


def test_upsilon_extend_shape(R2):
    d = d_vector(R2, R2.pi, 2, 3)
    ups = upsilon_extend(upsilon_init(d), d, [WittVector(R2, 2, [])])
    assert ups.n == 2


def test_zero_frames_no_witness(R2):
    pair = init_isogeny(2, R2, R2.pi)
    zero = [WittVector(R2, 2, [])]
    assert big_frame_check(pair.e_tower, pair.f_tower, pair.upsilon, zero, zero, R2.pi) is None


def test_isogeny_dim1_kernel(R2):
    pair = init_isogeny(2, R2, R2.pi)
    kc = kernel_count(pair)
    # mu_2 in Z_2[sqrt 2] is {1, -1}
    assert kc["points"] == 2


def test_roots_in_ring(R2):
    # x^2 - 1 has the two roots +1 and -1
    cert, pending = roots_in_ring([R2.coerce(-1), R2.zero, R2.one], R2)
    assert cert == 2 and pending == 0


def test_search_equal_lambdas_agrees(R2):
    pair = init_isogeny(2, R2, R2.pi)
    res = big_frame_search(pair, R2.pi, [0, 1, "pi"], depth=2, enlarge=False, samples=5)
    assert res["agreement"]
    assert res["rounds"][0]["rows"]


def test_previous_convention_positive(R2):
    pair = init_isogeny(2, R2, R2.pi ** 2)
    res = big_frame_search(pair, R2.pi, [0, 1, "pi"], depth=2, enlarge=False, samples=5,
                           c_convention="previous")
    assert res["agreement"]
    assert res["positives"]
    row = res["positives"][0]
    assert row["isogeny_checks"]
    assert row["kernel_points"] == 2


def test_bad_convention(R2):
    pair = init_isogeny(2, R2, R2.pi)
    zero = [WittVector(R2, 2, [])]
    with pytest.raises(ValueError):
        big_frame_check(pair.e_tower, pair.f_tower, pair.upsilon, zero, zero, R2.pi, c_convention="x")
