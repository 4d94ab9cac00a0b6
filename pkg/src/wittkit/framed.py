"""Framed group schemes built by induction on the dimension.

A tower of dimension n over a ring R is an iterated extension of the groups
G^{lambda_i} (law x + y + lambda_i x y).  Each extension step consumes a
*frame* (a, b) with U^n(a) = lambda_{n+1}.b and produces

* the fundamental morphism D_n and its lift D_n^{-1} (products of truncated
  deformed exponentials),
* the correction K with D_n(X) D_n(Y) = D_n(X*Y) + lambda_{n+1} K(X, Y),
* the group law of the next level and the operator matrix U^{n+1}.

Two modes are supported.  ``algebraic`` uses truncated exponentials of the
requested levels; ``formal`` uses exponentials truncated only by total degree
and forms the 2-cocycle H_n = (D_n(X) D_n(Y) / D_n(X*Y) - 1) / lambda_{n+1}.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field, replace
from typing import Sequence

from .exponentials import TruncationLevel, TruncSeries, ep_vector
from .ring import (
    EisensteinElem, EisensteinRing, MultiPoly, NotDivisible, NotIntegral, PolyRing, PrecisionExhausted,
)
from .witt import (
    TruncationClass, WittVector, f_lambda, in_truncation_class, scalar_div, t_map, witt_add, witt_neg,
    _exact_zero,
)

__all__ = [
    "InvalidLambda", "TruncationTooCoarse", "Frame", "FLambdaOp", "TOp", "OperatorMatrix",
    "TowerState", "init_tower", "frame_search", "extend_tower", "alpha_map", "verify_group_axioms",
    "witt_box", "check_frame", "auto_levels", "TowerLevel",
]


class InvalidLambda(ValueError):
    """lambda is a zero divisor (or zero where a nonzerodivisor is required)."""


class TruncationTooCoarse(ArithmeticError):
    """D_n D_n^{-1} is not 1 modulo lambda_{n+1}: the truncation levels must grow."""


# ---------------------------------------------------------------------------
# operators on vectors of Witt vectors


@dataclass(frozen=True)
class FLambdaOp:
    lam: object

    def apply(self, x: WittVector) -> WittVector:
        return f_lambda(x, self.lam)

    def __str__(self):
        return f"F^({self.lam})"


@dataclass(frozen=True)
class TOp:
    a: WittVector
    sign: int = 1

    def apply(self, x: WittVector) -> WittVector:
        y = t_map(self.a, x)
        return y if self.sign > 0 else witt_neg(y)

    def __str__(self):
        return f"{'-' if self.sign < 0 else ''}T_{self.a!r}"


class OperatorMatrix:
    """Square matrix of additive operators; ``None`` entries are zero."""

    def __init__(self, entries: Sequence[Sequence]):
        self.entries = [list(row) for row in entries]
        self.n = len(self.entries)

    def apply(self, vec: Sequence[WittVector]) -> list[WittVector]:
        if len(vec) != self.n:
            raise ValueError(f"expected {self.n} Witt vectors, got {len(vec)}")
        out = []
        for row in self.entries:
            acc = None
            for op, x in zip(row, vec):
                if op is None:
                    continue
                y = op.apply(x)
                acc = y if acc is None else witt_add(acc, y)
            out.append(acc if acc is not None else WittVector(vec[0].ring, vec[0].p, ()))
        return out

    def extend(self, column: Sequence, corner) -> "OperatorMatrix":
        rows = [row + [c] for row, c in zip(self.entries, column)]
        rows.append([None] * self.n + [corner])
        return OperatorMatrix(rows)

    def block(self, n: int) -> "OperatorMatrix":
        return OperatorMatrix([row[:n] for row in self.entries[:n]])

    def describe(self):
        return [[None if e is None else str(e) for e in row] for row in self.entries]


# ---------------------------------------------------------------------------
# tower state


@dataclass(frozen=True)
class Frame:
    a: tuple
    b: tuple

    def to_json(self):
        return {"a": [w.to_json() for w in self.a], "b": [w.to_json() for w in self.b]}


@dataclass(frozen=True)
class TowerLevel:
    """Data attached to the extension from dimension k to k+1."""

    lam_next: object
    frame: Frame
    D: MultiPoly
    D_inv: MultiPoly
    K: MultiPoly
    H: MultiPoly | None
    levels: tuple


@dataclass(frozen=True)
class TowerState:
    mode: str
    p: int
    ring: object
    lambdas: tuple
    levels: tuple
    U: OperatorMatrix
    poly_ring: PolyRing
    degree_cap: int = 12

    @property
    def n(self) -> int:
        return len(self.lambdas)

    # -- polynomials
    def D(self, k: int) -> MultiPoly:
        """D_k (D_0 = 1)."""
        return self.poly_ring.one if k == 0 else self.levels[k - 1].D

    def D_inv(self, k: int) -> MultiPoly:
        return self.poly_ring.one if k == 0 else self.levels[k - 1].D_inv

    def X(self, i: int) -> MultiPoly:
        return self.poly_ring.var(f"X{i}")

    def Y(self, i: int) -> MultiPoly:
        return self.poly_ring.var(f"Y{i}")

    # -- the group law
    def law(self, P: Sequence, Q: Sequence) -> list:
        """P * Q for points (or polynomial vectors) of length n."""
        lam1 = self.lambdas[0]
        out = [P[0] + Q[0] + lam1 * P[0] * Q[0]]
        for k in range(1, self.n):
            lev = self.levels[k - 1]
            Pk, Qk = list(P[:k]), list(Q[:k])
            DP = _eval_in(lev.D, Pk, None, self)
            DQ = _eval_in(lev.D, Qk, None, self)
            Kv = _eval_in(lev.K, Pk, Qk, self)
            x, y = P[k], Q[k]
            out.append(x * DQ + y * DP + self.lambdas[k] * x * y + Kv)
        return out

    def law_symbolic(self, k: int | None = None) -> list:
        k = self.n if k is None else k
        sub = self if k == self.n else self.truncated(k)
        X = [self.X(i) for i in range(1, k + 1)]
        Y = [self.Y(i) for i in range(1, k + 1)]
        out = sub.law(X, Y)
        if self.mode == "formal":
            out = [_cap_degree(c, self.degree_cap) for c in out]
        return out

    def truncated(self, k: int) -> "TowerState":
        return replace(self, lambdas=self.lambdas[:k], levels=self.levels[: k - 1], U=self.U.block(k))

    def alpha(self, P: Sequence) -> list:
        return [_eval_in(self.D(k), list(P[:k]), None, self) + self.lambdas[k] * P[k] for k in range(self.n)]

    def inverse(self, P: Sequence) -> list:
        """Solve P * Q = 0 coordinate by coordinate."""
        R = self.ring
        lam1 = self.lambdas[0]
        Q = [R.exact_div(-P[0], R.one + lam1 * P[0])]
        for k in range(1, self.n):
            lev = self.levels[k - 1]
            Pk = list(P[:k])
            DP = _eval_in(lev.D, Pk, None, self)
            DQ = _eval_in(lev.D, Q, None, self)
            Kv = _eval_in(lev.K, Pk, Q, self)
            x = P[k]
            Q.append(R.exact_div(-(x * DQ + Kv), DP + self.lambdas[k] * x))
        return Q

    def zero_point(self) -> list:
        return [self.ring.zero] * self.n

    def to_json(self) -> dict:
        R = self.ring
        return {
            "mode": self.mode, "p": self.p, "ring": R.describe(), "dimension": self.n,
            "lambdas": [R.fmt(l) for l in self.lambdas],
            "levels": [{
                "lambda_next": R.fmt(lv.lam_next), "frame": lv.frame.to_json(),
                "truncation": [list(t) for t in lv.levels],
                "D": str(lv.D), "D_inv": str(lv.D_inv), "K": str(lv.K),
                **({"H": str(lv.H)} if lv.H is not None else {}),
            } for lv in self.levels],
            "law": [str(c) for c in self.law_symbolic()],
            "alpha": [str(a) for a in alpha_map(self)],
            "U": self.U.describe(),
        }


def _eval_in(poly: MultiPoly, P, Q, state: TowerState):
    """Evaluate a polynomial in X1..Xk (and Y1..Yk) at the given coordinates."""
    vals = {}
    for i, v in enumerate(P, 1):
        vals[f"X{i}"] = v
    if Q is not None:
        for i, v in enumerate(Q, 1):
            vals[f"Y{i}"] = v
    sample = next(iter(vals.values()), None)
    if isinstance(sample, MultiPoly):
        target = sample.ring
        return poly.evaluate({k: target.coerce(v) for k, v in vals.items()}, target)
    return poly.evaluate(vals, state.ring)


def _cap_degree(f: MultiPoly, cap: int) -> MultiPoly:
    return MultiPoly(f.ring, {e: c for e, c in f.terms.items() if sum(e) <= cap})


def _lam_ok(R, lam):
    if isinstance(lam, EisensteinElem):
        return not lam.is_zero()
    if isinstance(lam, MultiPoly):
        return not lam.is_zero()
    return lam != 0


def init_tower(p: int, ring, lam1, mode: str = "algebraic", max_dim: int = 4, degree_cap: int = 12) -> TowerState:
    """Dimension-one tower: G^{lam1}, D_0 = 1, U^1 = F^{lam1}."""
    lam1 = ring.coerce(lam1)
    if mode not in ("algebraic", "formal"):
        raise ValueError("mode is 'algebraic' or 'formal'")
    if mode == "algebraic" and not _lam_ok(ring, lam1):
        raise InvalidLambda("lambda_1 must be a nonzerodivisor in algebraic mode")
    names = [f"X{i}" for i in range(1, max_dim + 1)] + [f"Y{i}" for i in range(1, max_dim + 1)]
    poly_ring = PolyRing(names, ring, p=p)
    return TowerState(mode, p, ring, (lam1,), (), OperatorMatrix([[FLambdaOp(lam1)]]), poly_ring, degree_cap)


# ---------------------------------------------------------------------------
# frames


def witt_box(ring, p: int, values: Sequence, depth: int) -> list[WittVector]:
    """All Witt vectors with coordinates 0..depth-1 drawn from ``values``."""
    vals = [ring.coerce(v) if not isinstance(v, str) else ring.parse(v) for v in values]
    return [WittVector(ring, p, list(c)) for c in itertools.product(vals, repeat=depth)]


def check_frame(state: TowerState, a: Sequence[WittVector], lam_next) -> Frame | None:
    """Return the frame (a, U(a)/lam_next) if every computed coordinate is divisible, else None."""
    image = state.U.apply(list(a))
    try:
        b = tuple(scalar_div(w, lam_next) for w in image)
    except (NotDivisible, NotIntegral):
        return None
    return Frame(tuple(a), b)


def frame_search(state: TowerState, lam_next, box: Sequence, depth: int = 2, limit: int | None = None) -> list[Frame]:
    """Frames for the next extension with each a_i drawn from the coefficient box."""
    lam_next = state.ring.coerce(lam_next)
    cands = witt_box(state.ring, state.p, box, depth)
    found = []
    for combo in itertools.product(cands, repeat=state.n):
        fr = check_frame(state, combo, lam_next)
        if fr is not None:
            found.append(fr)
            if limit is not None and len(found) >= limit:
                break
    return found


# ---------------------------------------------------------------------------
# extension


def _min_power_divisible(x, lam, R, cap=64) -> int:
    acc = x
    for k in range(1, cap + 1):
        if R.is_zero(acc):
            return k
        try:
            R.exact_div(acc, lam)
            return k
        except (NotDivisible, NotIntegral, PrecisionExhausted):
            acc = acc * x
    raise TruncationTooCoarse(f"{x} is not nilpotent modulo {lam}")


def auto_levels(state: TowerState, frame: Frame, lam_next) -> tuple:
    """Smallest (L_i, M_i, N_i) satisfying the truncation hypotheses for each factor."""
    R = state.ring
    out = []
    for i, a in enumerate(frame.a):
        L = _min_power_divisible(state.lambdas[i], lam_next, R)
        M = max(1, len(a.coords))
        N = max([1] + [_min_power_divisible(c, lam_next, R) for c in a.coords if not R.is_zero(c)])
        out.append((L, M, N))
    return tuple(out)


def _fundamental(state: TowerState, coords: Sequence[WittVector], lams, levels, sign=1):
    """prod_i E(a_i, lam_i, D_{i-1}^{-1} X_i) as a polynomial in X1..Xn."""
    PR = state.poly_ring
    out = PR.one
    for i, (a, lam) in enumerate(zip(coords, lams), 1):
        if sign < 0:
            a = witt_neg(a)
        if state.mode == "formal":
            D = state.degree_cap
        else:
            L, M, N = levels[i - 1]
            D = TruncationLevel(L, M, N, state.p).B
        series = ep_vector(a, lam, D, state.p, state.ring)
        arg = state.D_inv(i - 1) * state.X(i)
        val = series.evaluate(arg, PR)
        if not isinstance(val, MultiPoly):
            val = PR.const(val)
        out = out * val
        if state.mode == "formal":
            out = _cap_degree(out, state.degree_cap)
    return out


def _swap_xy(f: MultiPoly, n: int) -> MultiPoly:
    PR = f.ring
    return f.evaluate({**{f"X{i}": PR.var(f"Y{i}") for i in range(1, n + 1)}}, PR) if f.terms else f


def _series_inverse(f: MultiPoly, cap: int) -> MultiPoly:
    """1/f for f = 1 + (terms of positive degree), truncated at total degree cap."""
    PR = f.ring
    h = f - PR.one
    if h.constant_term() and not PR.coeffs.is_zero(h.constant_term()):
        raise ValueError("series inverse needs constant term 1")
    out, power = PR.one, PR.one
    for _ in range(cap):
        power = _cap_degree(power * (-h), cap)
        if power.is_zero():
            break
        out = out + power
    return out


def extend_tower(state: TowerState, frame: Frame, lam_next, levels=None, check_class: bool = True) -> TowerState:
    """Add one dimension using ``frame``; see the module docstring."""
    R = state.ring
    n = state.n
    lam_next = R.coerce(lam_next)
    if state.mode == "algebraic" and not _lam_ok(R, lam_next):
        raise InvalidLambda("lambda_{n+1} must be a nonzerodivisor in algebraic mode")
    if len(frame.a) != n:
        raise ValueError(f"frame must have {n} components")
    # the frame must satisfy U^n(a) = lam_next . b on the computed range
    image = state.U.apply(list(frame.a))
    for w, b in zip(image, frame.b):
        prod = WittVector(R, state.p, [lam_next * c for c in b.coords], b.horizon)
        if not prod.equals(w):
            raise NotDivisible("frame relation U(a) = lambda.b fails")
    if state.mode == "algebraic":
        if levels is None:
            levels = auto_levels(state, frame, lam_next)
        levels = tuple(tuple(l) for l in levels)
        if len(levels) != n:
            raise ValueError("need one truncation level per factor")
        if check_class:
            for i, (a, (L, M, N)) in enumerate(zip(frame.a, levels)):
                if not in_truncation_class(a, TruncationClass(M, N, lam_next)):
                    raise ValueError(f"frame component {i + 1} is outside W_(M={M}, N={N}, lambda_next)")
                try:
                    R.exact_div(state.lambdas[i] ** L, lam_next)
                except (NotDivisible, NotIntegral) as exc:
                    raise ValueError(f"lambda_{i + 1}^{L} is not divisible by lambda_next") from exc
    else:
        levels = ()
    D = _fundamental(state, frame.a, state.lambdas, levels)
    D_inv = _fundamental(state, frame.a, state.lambdas, levels, sign=-1)
    PR = state.poly_ring
    cap = state.degree_cap
    # D * D_inv must be 1 modulo lam_next
    check = D * D_inv - PR.one
    if state.mode == "formal":
        check = _cap_degree(check, cap)
    try:
        check.exact_div(lam_next)
    except (NotDivisible, NotIntegral) as exc:
        raise TruncationTooCoarse("D_n * D_n^{-1} is not 1 modulo lambda_{n+1}") from exc
    DX = D
    DY = _swap_xy(D, n)
    star = state.law_symbolic(n)
    Dstar = D.evaluate({f"X{i}": star[i - 1] for i in range(1, n + 1)}, PR)
    H = None
    if state.mode == "formal":
        Dstar = _cap_degree(Dstar, cap)
        ratio = _cap_degree(DX * DY * _series_inverse(Dstar, cap), cap) - PR.one
        H = ratio.exact_div(lam_next)
        K = _cap_degree(Dstar * H, cap)
    else:
        K = (DX * DY - Dstar).exact_div(lam_next)
    column = [TOp(b, -1) for b in frame.b]
    U = state.U.extend(column, FLambdaOp(lam_next))
    level = TowerLevel(lam_next, frame, D, D_inv, K, H, levels)
    return replace(state, lambdas=state.lambdas + (lam_next,), levels=state.levels + (level,), U=U)


def alpha_map(state: TowerState) -> list[MultiPoly]:
    """alpha_k = D_{k-1} + lambda_k X_k for k = 1..n."""
    return [state.D(k) + state.X(k + 1) * state.lambdas[k] for k in range(state.n)]


# ---------------------------------------------------------------------------
# verification


def _random_point(state: TowerState, rng: random.Random, min_val: int = 1):
    R = state.ring
    if isinstance(R, EisensteinRing):
        return [R.random_element(rng, min_val) for _ in range(state.n)]
    if isinstance(R, PolyRing):
        raise ValueError("pointwise verification needs a concrete ring")
    p = state.p
    return [R.coerce(p ** min_val * rng.randrange(-50, 50)) for _ in range(state.n)]


def _eq(R, a, b) -> bool:
    return all(R.is_zero(x - y) for x, y in zip(a, b))


def verify_group_axioms(state: TowerState, samples: int = 50, seed: int = 0, points=None) -> dict:
    """Pointwise check of associativity, unit, inverse, commutativity and the alpha identity."""
    R = state.ring
    rng = random.Random(seed)
    checks = {"associativity": 0, "unit": 0, "inverse": 0, "commutativity": 0, "alpha_homomorphism": 0}
    violations = []
    zero = state.zero_point()
    for s in range(samples):
        if points is not None:
            P, Q, S = points(rng)
        else:
            P, Q, S = (_random_point(state, rng) for _ in range(3))
        PQ = state.law(P, Q)
        tests = {}
        tests["associativity"] = _eq(R, state.law(PQ, S), state.law(P, state.law(Q, S)))
        tests["unit"] = _eq(R, state.law(P, zero), P) and _eq(R, state.law(zero, P), P)
        try:
            Pinv = state.inverse(P)
            tests["inverse"] = _eq(R, state.law(P, Pinv), zero)
        except (NotDivisible, PrecisionExhausted):
            tests["inverse"] = False
        tests["commutativity"] = _eq(R, PQ, state.law(Q, P))
        aP, aQ, aPQ = state.alpha(P), state.alpha(Q), state.alpha(PQ)
        tests["alpha_homomorphism"] = all(R.is_zero(x - y * z) for x, y, z in zip(aPQ, aP, aQ))
        for name, ok in tests.items():
            if ok:
                checks[name] += 1
            else:
                violations.append({"check": name, "sample": s, "P": [R.fmt(c) for c in P],
                                   "Q": [R.fmt(c) for c in Q], "S": [R.fmt(c) for c in S]})
    return {"samples": samples, "passed": checks, "violations": violations, "ok": not violations}
