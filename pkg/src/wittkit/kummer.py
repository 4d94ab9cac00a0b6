"""Kummer isogenies between framed towers.

Contents: the Witt expansion of p, the d-vector with p[lam] = lam^p.d, the
dimension-one criterion and isogeny psi, the big-frame test producing a
z-witness, the Upsilon matrices, the operator T'_d and the isogeny between a
pair of towers of types (lam_1, lam_2) and (lam_1^p, lam_2^p).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from typing import Sequence

from .framed import (
    Frame, OperatorMatrix, TOp, TowerState, check_frame, extend_tower, init_tower, witt_box,
)
from .ring import (
    AT_LEAST_PRECISION, EisensteinElem, EisensteinRing, MultiPoly, NotDivisible, NotIntegral, PolyRing,
    PrecisionExhausted, ZZ, vp,
)
from .witt import (
    WittVector, ghost_lift, ghost_polynomials, integer_vector, scalar_div, t_map, teichmuller,
    teichmuller_scale, witt_mul, witt_sub, _ghost_values,
)

__all__ = [
    "PWittExpansion", "p_witt_expansion", "DVector", "d_vector", "Dim1Kummer", "kummer_dim1",
    "upsilon_init", "upsilon_extend", "BigFrame", "big_frame_check", "TPrimeTable", "tprime_d",
    "IsogenyTower", "init_isogeny", "isogeny_extend", "psi2_numerator", "kernel_count",
    "big_frame_search", "KUMMER_CONFIG", "C_CONVENTIONS", "check_isogeny", "roots_in_ring", "psi2_divides",
]

KUMMER_CONFIG = {"expansion_max_depth": 7, "tprime_max_depth": 5}


# ---------------------------------------------------------------------------
# p as a Witt vector


@dataclass(frozen=True)
class PWittExpansion:
    p: int
    components: tuple
    valuations: tuple  # (n, v_p(a_n), expected) for n >= 2

    @property
    def pattern_ok(self) -> bool:
        return all(v == e for _, v, e in self.valuations)

    def to_json(self):
        return {"p": self.p, "components": [str(a) for a in self.components],
                "valuations": [{"n": n, "v": v, "expected": e} for n, v, e in self.valuations],
                "pattern_ok": self.pattern_ok}


def _expected_valuation(p: int, n: int) -> int:
    return 2 ** (n - 2) + 1 if p == 2 else p - 1


def p_witt_expansion(p: int, depth: int) -> PWittExpansion:
    """Components a_0..a_depth of p in W(Z) by the triangular ghost solve."""
    if depth > KUMMER_CONFIG["expansion_max_depth"]:
        raise ValueError(f"depth {depth} exceeds the configured bound {KUMMER_CONFIG['expansion_max_depth']}")
    w = ghost_lift([p] * (depth + 1), p, ZZ)
    a = tuple(w.coords) + (0,) * (depth + 1 - len(w.coords))
    for n in range(depth + 1):  # ghost equations, exactly
        assert sum(p ** i * a[i] ** (p ** (n - i)) for i in range(n + 1)) == p
    assert a[0] == p and (depth < 1 or a[1] == 1 - p ** (p - 1))
    vals = tuple((n, vp(a[n], p), _expected_valuation(p, n)) for n in range(2, depth + 1))
    return PWittExpansion(p, a, vals)


# ---------------------------------------------------------------------------
# d-vectors


@dataclass(frozen=True)
class DVector:
    ring: object
    p: int
    lam: object
    coords: tuple

    def witt(self) -> WittVector:
        return WittVector(self.ring, self.p, list(self.coords), horizon=len(self.coords))

    def to_json(self):
        return {"p": self.p, "lambda": self.ring.fmt(self.lam), "d": [self.ring.fmt(c) for c in self.coords]}


def _default_c(ring, p, lam):
    if isinstance(ring, PolyRing) and ring.o_rule is not None:
        return ring.var(ring.vars[0]) if "C" not in ring.index else ring.var("C")
    return ring.exact_div(ring.coerce(p), lam ** (p - 1))


def d_vector(ring, lam, p: int, depth: int = 3) -> DVector:
    """d_0..d_depth with p[lam] = (lam^p d_0, lam^p d_1, ...)."""
    lam = ring.coerce(lam)
    pv = integer_vector(p, p, ring, depth + 1)
    p_lam = teichmuller_scale(lam, pv)  # p.[lam] = [lam].p
    lp = lam ** p
    d = tuple(ring.exact_div(c, lp) for c in p_lam.padded(depth + 1))
    c = _default_c(ring, p, lam)
    if not ring.is_zero(d[0] - c):
        raise AssertionError(f"d_0 = {ring.fmt(d[0])} differs from c = {ring.fmt(c)}")
    if depth >= 1 and not ring.is_zero(d[1] - ring.coerce(1 - p ** (p - 1))):
        raise AssertionError("d_1 differs from 1 - p^(p-1)")
    for i, di in enumerate(d):  # multiply back
        assert ring.is_zero(lp * di - p_lam.padded(depth + 1)[i])
    return DVector(ring, p, lam, d)


# ---------------------------------------------------------------------------
# dimension one


@dataclass(frozen=True)
class Dim1Kummer:
    finite_flat: bool
    generator: MultiPoly | None
    homomorphism_ok: bool | None

    @property
    def isogeny(self):
        return self.generator

    def to_json(self):
        return {"finite_flat": self.finite_flat,
                "generator": None if self.generator is None else str(self.generator),
                "isogeny": None if self.generator is None else f"x -> {self.generator}",
                "homomorphism_ok": self.homomorphism_ok}


def _xy_ring(ring, p):
    if isinstance(ring, PolyRing):
        return ring.with_vars(["x", "y"])
    return PolyRing(["x", "y"], ring, p=p)


def kummer_dim1(lam, ring, p: int) -> Dim1Kummer:
    """Finiteness of the Kummer kernel in G^lam and the isogeny psi: G^lam -> G^(lam^p)."""
    lam = ring.coerce(lam)
    try:
        ring.exact_div(ring.coerce(p), lam ** (p - 1))
    except (NotDivisible, NotIntegral):
        return Dim1Kummer(False, None, None)
    PR = _xy_ring(ring, p)
    x, y = PR.var("x"), PR.var("y")
    lamP = PR.coerce(lam) if isinstance(ring, PolyRing) else lam
    lp = lam ** p
    Q = ((x * lamP + 1) ** p - 1).exact_div(PR.coerce(lp) if isinstance(ring, PolyRing) else lp)

    def psi(t):
        return Q.subs({"x": t})

    lhs = psi(x + y + x * y * lamP)
    lpP = PR.coerce(lp) if isinstance(ring, PolyRing) else lp
    rhs = psi(x) + psi(y) + psi(x) * psi(y) * lpP
    return Dim1Kummer(True, Q, (lhs - rhs).vanishes())


# ---------------------------------------------------------------------------
# Upsilon matrices and big frames


def upsilon_init(d: DVector | WittVector) -> OperatorMatrix:
    w = d.witt() if isinstance(d, DVector) else d
    return OperatorMatrix([[TOp(w)]])


def upsilon_extend(upsilon: OperatorMatrix | None, d_next: DVector | WittVector, z: Sequence[WittVector] = ()) -> OperatorMatrix:
    w = d_next.witt() if isinstance(d_next, DVector) else d_next
    if upsilon is None:
        return OperatorMatrix([[TOp(w)]])
    if len(z) != upsilon.n:
        raise ValueError("z must have one component per row of Upsilon")
    return upsilon.extend([TOp(zi, -1) for zi in z], TOp(w))


@dataclass(frozen=True)
class BigFrame:
    a: tuple
    b: tuple
    u: tuple
    v: tuple
    z: tuple

    def to_json(self):
        return {k: [w.to_json() for w in getattr(self, k)] for k in ("a", "b", "u", "v", "z")}


C_CONVENTIONS = ("printed", "previous")


def _c_vector(e_tower: TowerState, lam_next, convention: str = "printed") -> list:
    """c = (a^n, [lam]) with lam = lam_{n+1} ("printed") or lam_n ("previous")."""
    if convention not in C_CONVENTIONS:
        raise ValueError(f"c convention must be one of {C_CONVENTIONS}")
    R = e_tower.ring
    prev = list(e_tower.levels[-1].frame.a) if e_tower.levels else []
    lam = lam_next if convention == "printed" else e_tower.lambdas[-1]
    return prev + [teichmuller(lam, e_tower.p, R)]


def big_frame_check(e_tower: TowerState, f_tower: TowerState, upsilon: OperatorMatrix,
                    a_next: Sequence[WittVector], u_next: Sequence[WittVector], lam_next,
                    c_convention: str = "printed"):
    """z with p.a - c - Upsilon(u) = lam_next^p . z, or None."""
    R, p = e_tower.ring, e_tower.p
    lam_next = R.coerce(lam_next)
    if check_frame(e_tower, a_next, lam_next) is None:
        raise ValueError("a is not a frame for the E-side tower")
    if check_frame(f_tower, u_next, lam_next ** p) is None:
        raise ValueError("u is not a frame for the F-side tower")
    c = _c_vector(e_tower, lam_next, c_convention)
    pv = integer_vector(p, p, R)
    ups = upsilon.apply(list(u_next))
    lp = lam_next ** p
    z = []
    for ai, ci, yi in zip(a_next, c, ups):
        left = witt_sub(witt_sub(witt_mul(pv, ai), ci), yi)
        try:
            zi = scalar_div(left, lp)
        except (NotDivisible, NotIntegral):
            return None
        # multiply back
        back = WittVector(R, p, [lp * t for t in zi.coords], zi.horizon)
        assert back.equals(left)
        z.append(zi)
    return z


# ---------------------------------------------------------------------------
# T'_d


@dataclass
class TPrimeTable:
    p: int
    R: int
    matrix: list            # c[n][k], k <= n
    remainders: list        # must all vanish
    specialization_ok: bool
    intertwining_ok: list | None = None
    lift: list | None = None
    lift_integral: bool | None = None

    def to_json(self, ring):
        return {
            "p": self.p, "R": self.R,
            "matrix": [[ring.fmt(c) for c in row] for row in self.matrix],
            "remainders_zero": all(ring.is_zero(r) for r in self.remainders),
            "specialization_ok": self.specialization_ok,
            "intertwining_ok": self.intertwining_ok,
            "lift": None if self.lift is None else [str(g) for g in self.lift],
            "lift_integral": self.lift_integral,
        }


def _alpha_coeffs(d, lam, p, n, ring):
    """Coefficients of alpha_n on y_0..y_{n+1}."""
    a = [ring.zero] * (n + 2)
    for i in range(n + 2):
        a[n + 1 - i] = a[n + 1 - i] + d[i] ** (p ** (n + 1 - i)) * (p ** i)
    mu = lam ** (p ** n * (p - 1))
    for i in range(n + 1):
        a[n - i] = a[n - i] - mu * d[i] ** (p ** (n - i)) * (p ** i)
    return a


def tprime_d(d: DVector, R: int = 4, witt_lift: bool = True, intertwining: bool = True) -> TPrimeTable:
    """Ghost matrix of t'_d (indices < R), its checks and the Witt-side lift."""
    if R > KUMMER_CONFIG["tprime_max_depth"]:
        raise ValueError("R exceeds the configured bound")
    ring, p, lam = d.ring, d.p, d.lam
    if len(d.coords) < R + 1:
        raise ValueError(f"need d_0..d_{R}")
    mat, rems = [], []
    spec_ok = True
    for n in range(R):
        a = _alpha_coeffs(d.coords, lam, p, n, ring)
        # specialization y_i = lam^(p(p^i - 1)) y_0
        s = ring.zero
        for j, aj in enumerate(a):
            s = s + aj * lam ** (p * (p ** j - 1))
        spec_ok = spec_ok and ring.is_zero(s)
        # back-substitution in beta_k = y_{k+1} - lam^(p^(k+1)(p-1)) y_k
        a = list(a)
        row = [ring.zero] * R
        for k in range(n, -1, -1):
            ck = a[k + 1]
            row[k] = ck
            a[k + 1] = ring.zero
            a[k] = a[k] + ck * lam ** (p ** (k + 1) * (p - 1))
        rems.append(a[0])
        mat.append(row)
    if not all(ring.is_zero(r) for r in rems):
        raise AssertionError("alpha_n is not a combination of the beta_k")
    table = TPrimeTable(p, R, mat, rems, spec_ok)
    if intertwining or witt_lift:
        names = [f"Z{i}" for i in range(R + 1)]
        PR = ring.with_vars(names) if isinstance(ring, PolyRing) else PolyRing(names, ring, p=p)
        Z = [PR.var(v) for v in names]
        phi = _ghost_values(p, Z, R, PR.zero)
    if intertwining:
        lamP = PR.coerce(lam) if isinstance(ring, PolyRing) else lam
        dw = WittVector(PR, p, [PR.coerce(c) if isinstance(ring, PolyRing) else PR.const(c) for c in d.coords[: R + 1]],
                        horizon=R + 1)
        x = WittVector(PR, p, Z, horizon=R + 1)
        tdx = t_map(dw, x, R + 1)
        g = _ghost_values(p, tdx.padded(R + 1), R, PR.zero)
        ok = []
        for n in range(R):
            lhs = g[n + 1] - g[n] * lamP ** (p ** n * (p - 1))
            rhs = PR.zero
            for k in range(n + 1):
                beta = phi[k + 1] - phi[k] * lamP ** (p ** (k + 1) * (p - 1))
                rhs = rhs + beta * (PR.coerce(mat[n][k]) if isinstance(ring, PolyRing) else mat[n][k])
            ok.append((lhs - rhs).vanishes())
        table.intertwining_ok = ok
    if witt_lift:
        vals = []
        for n in range(R):
            acc = PR.zero
            for k in range(n + 1):
                acc = acc + phi[k] * (PR.coerce(mat[n][k]) if isinstance(ring, PolyRing) else mat[n][k])
            vals.append(acc)
        try:
            table.lift = list(ghost_lift(vals, p, PR).coords)
            table.lift_integral = True
        except NotIntegral:
            table.lift_integral = False
            raise
    return table


# ---------------------------------------------------------------------------
# isogenies between towers


@dataclass(frozen=True)
class IsogenyTower:
    e_tower: TowerState
    f_tower: TowerState
    upsilon: OperatorMatrix
    omega_diag: tuple
    psi: tuple          # Psi_1 as polynomial in X1; Psi_2 numerator (divide by alpha_1) if n = 2
    big_frames: tuple = ()

    @property
    def n(self):
        return self.e_tower.n

    # points ------------------------------------------------------------
    def alpha(self, P):
        return self.e_tower.alpha(P)

    def beta(self, Q):
        return self.f_tower.alpha(Q)

    def theta(self, t):
        out = [t[0] ** self.e_tower.p]
        for k in range(1, len(t)):
            out.append(self.e_tower.ring.exact_div(t[k] ** self.e_tower.p, t[k - 1]))
        return out

    def Psi(self, P):
        R = self.e_tower.ring
        vals = {f"X{i + 1}": c for i, c in enumerate(P)}
        out = [self.psi[0].evaluate(vals, R)]
        if self.n >= 2:
            a1 = R.one + self.e_tower.lambdas[0] * P[0]
            out.append(R.exact_div(self.psi[1].evaluate(vals, R), a1))
        return out

    def to_json(self):
        R = self.e_tower.ring
        return {
            "dimension": self.n,
            "e_lambdas": [R.fmt(l) for l in self.e_tower.lambdas],
            "f_lambdas": [R.fmt(l) for l in self.f_tower.lambdas],
            "upsilon": self.upsilon.describe(),
            "omega_diag": [t.to_json(R) for t in self.omega_diag],
            "Psi": [str(self.psi[0])] + ([f"({self.psi[1]}) / (1 + ({R.fmt(self.e_tower.lambdas[0])})*X1)"]
                                         if self.n >= 2 else []),
            "big_frames": [bf.to_json() for bf in self.big_frames],
        }


def init_isogeny(p: int, ring, lam1, d_depth: int = 3) -> IsogenyTower:
    """Dimension one: psi from kummer_dim1, Upsilon^1 = T_{d(lam1)}."""
    lam1 = ring.coerce(lam1)
    k1 = kummer_dim1(lam1, ring, p)
    if not k1.finite_flat:
        raise NotDivisible("lambda_1^(p-1) does not divide p")
    e = init_tower(p, ring, lam1)
    f = init_tower(p, ring, lam1 ** p)
    d = d_vector(ring, lam1, p, d_depth)
    PR = e.poly_ring
    psi1 = k1.generator.evaluate({"x": PR.var("X1"), "y": PR.var("Y1")}, PR)
    # Theta^1(alpha) = beta(psi): (1 + lam X)^p = 1 + lam^p psi(X)
    X1 = PR.var("X1")
    assert ((X1 * lam1 + 1) ** p - (psi1 * lam1 ** p + 1)).vanishes()
    omega = (tprime_d(d, min(d_depth, 3), witt_lift=False, intertwining=False),)
    return IsogenyTower(e, f, upsilon_init(d), omega, (psi1,))


def psi2_numerator(e2: TowerState, f2: TowerState, psi1: MultiPoly) -> MultiPoly:
    """alpha_2^p - alpha_1 E_1(Psi_1); Psi_2 = this / (alpha_1 lam_2^p)."""
    p = e2.p
    PR = e2.poly_ring
    X1 = PR.var("X1")
    alpha = [X1 * e2.lambdas[0] + 1, e2.D(1) + PR.var("X2") * e2.lambdas[1]]
    E1 = f2.D(1).evaluate({"X1": psi1}, PR)
    return alpha[1] ** p - alpha[0] * E1


def _unit_mod(ring, lam1, mod) -> bool:
    """1 + lam1 X is a unit modulo mod in R[X] iff lam1 is nilpotent modulo mod."""
    acc = lam1
    for _ in range(64):
        try:
            ring.exact_div(acc, mod)
            return True
        except (NotDivisible, NotIntegral):
            acc = acc * lam1
    return False


def psi2_divides(e2: TowerState, f2: TowerState, psi1: MultiPoly):
    """(ok, Psi_2 numerator or None): every coefficient of the numerator divisible by lam_2^p."""
    R, p = e2.ring, e2.p
    lp = e2.lambdas[1] ** p
    if not _unit_mod(R, e2.lambdas[0], lp):
        raise NotImplementedError("alpha_1 must be a unit modulo lambda_2^p for the coefficient test")
    N = psi2_numerator(e2, f2, psi1)
    try:
        return True, N.exact_div(lp)
    except (NotDivisible, NotIntegral):
        return False, None


def isogeny_extend(pair: IsogenyTower, big_frame: BigFrame, lam_next, e_levels=None, f_levels=None,
                   samples: int = 50, seed: int = 0) -> IsogenyTower:
    """Extend both towers and the isogeny from dimension 1 to 2."""
    if pair.n != 1:
        raise NotImplementedError("isogeny_extend is implemented for the step n = 1 -> 2")
    R, p = pair.e_tower.ring, pair.e_tower.p
    lam_next = R.coerce(lam_next)
    e2 = extend_tower(pair.e_tower, Frame(big_frame.a, big_frame.b), lam_next, e_levels)
    f2 = extend_tower(pair.f_tower, Frame(big_frame.u, big_frame.v), lam_next ** p, f_levels)
    d_next = d_vector(R, lam_next, p, 3)
    ups = upsilon_extend(pair.upsilon, d_next, big_frame.z)
    ok, psi2 = psi2_divides(e2, f2, pair.psi[0])
    if not ok:
        raise NotDivisible("Psi_2 is not integral although a z-witness exists")
    omega = pair.omega_diag + (tprime_d(d_next, 3, witt_lift=False, intertwining=False),)
    out = IsogenyTower(e2, f2, ups, omega, (pair.psi[0], psi2), pair.big_frames + (big_frame,))
    rep = check_isogeny(out, samples, seed)
    if not rep["ok"]:
        raise AssertionError(f"isogeny identities fail: {rep['violations'][:3]}")
    return out


def check_isogeny(pair: IsogenyTower, samples: int = 50, seed: int = 0) -> dict:
    """Theta(alpha(P)) = beta(Psi(P)) and beta(Psi(P*Q)) = beta(Psi(P)) beta(Psi(Q)) at random points."""
    R = pair.e_tower.ring
    rng = random.Random(seed)
    passed = {"theta_alpha": 0, "beta_psi_hom": 0}
    bad = []
    for s in range(samples):
        P = [R.random_element(rng, 1) for _ in range(pair.n)]
        Q = [R.random_element(rng, 1) for _ in range(pair.n)]
        lhs = pair.theta(pair.alpha(P))
        rhs = pair.beta(pair.Psi(P))
        if all(R.is_zero(x - y) for x, y in zip(lhs, rhs)):
            passed["theta_alpha"] += 1
        else:
            bad.append({"check": "theta_alpha", "sample": s})
        bPQ = pair.beta(pair.Psi(pair.e_tower.law(P, Q)))
        bP, bQ = pair.beta(pair.Psi(P)), pair.beta(pair.Psi(Q))
        if all(R.is_zero(x - y * z) for x, y, z in zip(bPQ, bP, bQ)):
            passed["beta_psi_hom"] += 1
        else:
            bad.append({"check": "beta_psi_hom", "sample": s})
    return {"samples": samples, "passed": passed, "violations": bad, "ok": not bad}


# ---------------------------------------------------------------------------
# kernel points


def _val(R, x):
    v = R.valuation(x)
    return R.N if v is AT_LEAST_PRECISION else v


def _poly_eval(coeffs, x, R):
    acc = R.zero
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def roots_in_ring(coeffs: Sequence, R: EisensteinRing, max_depth: int | None = None):
    """Roots in R of sum coeffs[k] x^k, separated by Hensel certification.

    Returns (certified, uncertified): the number of roots certified by
    v(f) > 2 v(f') inside their residue ball, and the number of balls left
    undecided at ``max_depth`` digits.
    """
    max_depth = R.N if max_depth is None else max_depth
    deriv = [k * c for k, c in enumerate(coeffs)][1:]
    certified, pending = 0, 0
    stack = [(R.zero, 0)]
    pi = R.pi
    while stack:
        x, j = stack.pop()
        if j >= max_depth:
            pending += 1
            continue
        step = pi ** j
        for t in range(R.p):
            y = x + step * t
            vf = _val(R, _poly_eval(coeffs, y, R))
            if vf < j + 1:
                continue
            vd = _val(R, _poly_eval(deriv, y, R))
            if vf > 2 * vd and j + 1 > vd and vf < R.N:
                certified += 1
            elif vf >= R.N and vd < (j + 1) and 2 * vd < R.N:
                certified += 1  # y is a root at full precision, simple
            else:
                stack.append((y, j + 1))
    return certified, pending


def kernel_count(pair: IsogenyTower, max_depth: int | None = None) -> dict:
    """Count R-points of ker(Psi) (equivalently Theta(alpha) = 1) by Hensel root finding."""
    R = pair.e_tower.ring
    if not isinstance(R, EisensteinRing):
        raise ValueError("kernel counting needs the Eisenstein backend")
    psi1 = pair.psi[0]
    c1 = [psi1.coefficient({"X1": k}) for k in range(psi1.degree("X1") + 1)]
    roots1 = _root_values(c1, R, max_depth)
    if pair.n == 1:
        return {"points": len(roots1), "pending": 0, "roots": [[R.fmt(r)] for r in roots1]}
    N = pair.psi[1]
    total, pending, pts = 0, 0, []
    for r in roots1:
        cs = []
        for k in range(N.degree("X2") + 1):
            part = MultiPoly(N.ring, {e: c for e, c in N.terms.items() if e[N.ring.index["X2"]] == k})
            cs.append(part.evaluate({"X1": r, "X2": R.one}, R))
        c, pnd = roots_in_ring(cs, R, max_depth)
        total += c
        pending += pnd
        pts.append({"x1": R.fmt(r), "x2_roots": c})
    return {"points": total, "pending": pending, "by_x1": pts}


def _root_values(coeffs, R, max_depth):
    """Explicit roots (Newton refined) of a separable polynomial."""
    max_depth = R.N if max_depth is None else max_depth
    deriv = [k * c for k, c in enumerate(coeffs)][1:]
    found = []
    stack = [(R.zero, 0)]
    pi = R.pi
    while stack:
        x, j = stack.pop()
        if j >= max_depth:
            continue
        for t in range(R.p):
            y = x + pi ** j * t
            vf = _val(R, _poly_eval(coeffs, y, R))
            if vf < j + 1:
                continue
            vd = _val(R, _poly_eval(deriv, y, R))
            if vf > 2 * vd and j + 1 > vd:
                for _ in range(8):  # Newton
                    fy = _poly_eval(coeffs, y, R)
                    if R.is_zero(fy):
                        break
                    y = y - R.exact_div(fy, _poly_eval(deriv, y, R))
                found.append(y)
            else:
                stack.append((y, j + 1))
    return found


# ---------------------------------------------------------------------------
# search over a box


def big_frame_search(pair: IsogenyTower, lam_next, box: Sequence, depth: int = 2, e_levels=None, f_levels=None,
                     enlarge: bool = True, samples: int = 50, seed: int = 0, c_convention: str = "printed") -> dict:
    """Exhaustive big-frame search for the step 1 -> 2 with agreement against the Psi_2 divisions.

    For every E-frame a and F-frame u from the box, records whether a z-witness
    exists and whether every coefficient division defining Psi_2 succeeds.  If no
    positive instance is found the Witt depth of the box is enlarged once.
    """
    R, p = pair.e_tower.ring, pair.e_tower.p
    lam_next = R.coerce(lam_next)
    rounds = []
    positives = []
    for dep in ([depth, depth + 1] if enlarge else [depth]):
        el = e_levels or [(2, dep, 2)]
        fl = f_levels or [(1, dep, 2)]
        cands = witt_box(R, p, box, dep)
        e_frames = [fr for a in cands if (fr := check_frame(pair.e_tower, [a], lam_next)) is not None]
        f_frames = [fr for u in cands if (fr := check_frame(pair.f_tower, [u], lam_next ** p)) is not None]
        e_ext = {}
        for fr in e_frames:
            try:
                e_ext[id(fr)] = extend_tower(pair.e_tower, fr, lam_next, el)
            except (NotDivisible, ValueError) as exc:
                e_ext[id(fr)] = exc
        f_ext = {}
        for fr in f_frames:
            try:
                f_ext[id(fr)] = extend_tower(pair.f_tower, fr, lam_next ** p, fl)
            except (NotDivisible, ValueError) as exc:
                f_ext[id(fr)] = exc
        rows = []
        for ef, ff in itertools.product(e_frames, f_frames):
            z = big_frame_check(pair.e_tower, pair.f_tower, pair.upsilon, ef.a, ff.a, lam_next, c_convention)
            e2, f2 = e_ext[id(ef)], f_ext[id(ff)]
            if isinstance(e2, Exception) or isinstance(f2, Exception):
                div = None
            else:
                div, _ = psi2_divides(e2, f2, pair.psi[0])
            row = {"a": ef.a[0].to_json(), "u": ff.a[0].to_json(), "witness": z is not None,
                   "psi2_divisible": div, "agree": div is None or (z is not None) == div}
            if z is not None and div:
                bf = BigFrame(ef.a, ef.b, ff.a, ff.b, tuple(z))
                ext = isogeny_extend(pair, bf, lam_next, el, fl, samples, seed)
                rep = check_isogeny(ext, samples, seed)
                kc = kernel_count(ext)
                row.update({"isogeny_checks": rep["ok"], "kernel_points": kc["points"],
                            "kernel_ok": kc["points"] == p ** 2 and kc["pending"] == 0})
                positives.append(row)
            rows.append(row)
        rounds.append({"depth": dep, "e_frames": len(e_frames), "f_frames": len(f_frames), "rows": rows})
        if positives:
            break
    return {
        "c_convention": c_convention,
        "rounds": rounds,
        "agreement": all(r["agree"] for rd in rounds for r in rd["rows"]),
        "positives": positives,
        "finding": None if positives else "no positive big frame in the box or its enlargement",
    }
