"""Deformed Artin-Hasse exponentials and their truncations.

The coefficient of T^n in E_p(U, L, T) is a polynomial in Z_(p)[L, U],
obtained here once per prime by exact logarithm/exponential manipulation
over Q[L, U] followed by an integrality check.  Concrete exponentials
specialize these polynomials.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .ring import QQ, ZZ, LocalRing, MultiPoly, NotIntegral, PolyRing, ResourceBudgetExceeded, _ring_of, vp
from .witt import WittVector, _eval_shared, _exact_zero

__all__ = [
    "TruncSeries", "TruncationLevel", "ep_coefficients", "ep_single", "ep_vector", "ep_truncated",
    "degree_support_check", "harmonic_decompose", "harmonic_reconstruct", "artin_hasse_oracle",
    "DEFAULT_DEGREE",
]

DEFAULT_DEGREE = 16


class TruncSeries:
    """Power series sum_k coeffs[k] T^k modulo T^(D+1)."""

    __slots__ = ("ring", "D", "coeffs")

    def __init__(self, ring, D: int, coeffs: Sequence = ()):
        cs = list(coeffs)[: D + 1]
        cs += [ring.zero] * (D + 1 - len(cs))
        self.ring = ring
        self.D = D
        self.coeffs = tuple(cs)

    @classmethod
    def one(cls, ring, D):
        return cls(ring, D, [ring.one])

    def __getitem__(self, k):
        return self.coeffs[k] if k <= self.D else self.ring.zero

    def _cap(self, o):
        return min(self.D, o.D)

    def __add__(self, o):
        D = self._cap(o)
        return TruncSeries(self.ring, D, [self[k] + o[k] for k in range(D + 1)])

    def __sub__(self, o):
        D = self._cap(o)
        return TruncSeries(self.ring, D, [self[k] - o[k] for k in range(D + 1)])

    def __mul__(self, o):
        if not isinstance(o, TruncSeries):
            return TruncSeries(self.ring, self.D, [c * o for c in self.coeffs])
        D = self._cap(o)
        zero = self.ring.zero
        a = [k for k in range(D + 1) if not _exact_zero(self[k])]
        b = [k for k in range(D + 1) if not _exact_zero(o[k])]
        out = [zero] * (D + 1)
        for i in a:
            ci = self[i]
            for j in b:
                if i + j > D:
                    break
                out[i + j] = out[i + j] + ci * o[j]
        return TruncSeries(self.ring, D, out)

    __rmul__ = __mul__

    def inverse(self) -> "TruncSeries":
        """Inverse of a series whose constant term is invertible (exact division)."""
        c0 = self[0]
        ring = self.ring
        inv = [ring.exact_div(ring.one, c0)]
        for n in range(1, self.D + 1):
            acc = ring.zero
            for k in range(1, n + 1):
                if not _exact_zero(self[k]):
                    acc = acc + self[k] * inv[n - k]
            inv.append(ring.exact_div(-acc, c0))
        return TruncSeries(ring, self.D, inv)

    def __truediv__(self, o):
        return self * o.inverse()

    def stretch(self, k: int, D: int | None = None) -> "TruncSeries":
        """Substitute T -> T^k and truncate at degree D (default: own cap)."""
        D = self.D if D is None else D
        out = [self.ring.zero] * (D + 1)
        for i, c in enumerate(self.coeffs):
            if i * k > D:
                break
            out[i * k] = c
        return TruncSeries(self.ring, D, out)

    def truncate(self, D: int) -> "TruncSeries":
        return TruncSeries(self.ring, min(D, self.D), self.coeffs[: D + 1])

    def degree(self) -> int:
        return max((k for k, c in enumerate(self.coeffs) if not self.ring.is_zero(c)), default=-1)

    def evaluate(self, x, target=None):
        """Horner evaluation of the (polynomial) truncation at x."""
        acc = None
        for c in reversed(self.coeffs):
            if acc is None:
                acc = c
                if target is not None:
                    acc = target.coerce(c)
                continue
            acc = acc * x + c
        return acc

    def equals(self, o: "TruncSeries", upto: int | None = None) -> bool:
        D = self._cap(o) if upto is None else upto
        return all(self.ring.is_zero(self[k] - o[k]) for k in range(D + 1))

    def __eq__(self, o):
        if not isinstance(o, TruncSeries):
            return NotImplemented
        return self.equals(o)

    __hash__ = None

    def to_json(self):
        return {"degree_cap": self.D, "coeffs": [self.ring.fmt(c) for c in self.coeffs], "ring": self.ring.describe()}

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if self.ring.is_zero(c):
                continue
            s = self.ring.fmt(c)
            if k and ("+" in s or " - " in s):
                s = f"({s})"
            terms.append(s if k == 0 else (f"{s}*T" if k == 1 else f"{s}*T^{k}"))
        return (" + ".join(terms) or "0") + f" + O(T^{self.D + 1})"


# ---------------------------------------------------------------------------
# universal coefficients


_COEFF_CACHE: dict = {}
_COEFF_LOCK = threading.Lock()


def _universal_ring(p):
    return PolyRing(["L", "U"], LocalRing(p), p=p)


def ep_coefficients(p: int, D: int) -> list:
    """Coefficients e_0..e_D of E_p(U, L, T) as polynomials in Z_(p)[L, U]."""
    with _COEFF_LOCK:
        cached = _COEFF_CACHE.get(p)
        if cached is not None and len(cached) > D:
            return cached[: D + 1]
        coeffs = _compute_coefficients(p, max(D, DEFAULT_DEGREE))
        _COEFF_CACHE[p] = coeffs
        return coeffs[: D + 1]


def _compute_coefficients(p: int, D: int) -> list:
    Q = PolyRing(["L", "U"], QQ, p=p)
    L, U = Q.var("L"), Q.var("U")
    log = [Q.zero] * (D + 1)
    for m in range(1, D + 1):
        log[m] = log[m] + U * L ** (m - 1) * Fraction((-1) ** (m + 1), m)
    k = 1
    while p ** k <= D:
        q, q1 = p ** k, p ** (k - 1)
        for m in range(1, D // q + 1):
            sgn = Fraction((-1) ** (m + 1), m * q)
            log[q * m] = log[q * m] + (U ** q * L ** (q * (m - 1)) - U ** q1 * L ** (q * m - q1)) * sgn
        k += 1
    e = [Q.one]
    for n in range(1, D + 1):
        acc = Q.zero
        for j in range(1, n + 1):
            if log[j]:
                acc = acc + log[j] * e[n - j] * j
        e.append(acc.scale(Fraction(1, n)))
    target = _universal_ring(p)
    out = []
    for n, c in enumerate(e):
        for coef in c.terms.values():
            if Fraction(coef).denominator % p == 0:
                raise NotIntegral(f"coefficient of T^{n} is not p-integral: {c}")
        out.append(target.from_terms(c.terms))
    return out


def _specialize(p, D, u, lam, ring):
    polys = ep_coefficients(p, D)
    if _exact_zero(u):
        return TruncSeries.one(ring, D)
    vals = [lam, u]
    return TruncSeries(ring, D, _eval_shared(polys, vals, ring))


def _ring_for(*xs):
    for x in xs:
        if not isinstance(x, (int, Fraction)):
            return _ring_of(x)
    return None


def ep_single(u, lam, D: int = DEFAULT_DEGREE, p: int | None = None, ring=None) -> TruncSeries:
    """E_p(u, lam, T) modulo T^(D+1)."""
    ring = ring or _ring_for(u, lam) or LocalRing(_need_p(p))
    p = p or ring.p
    u, lam = _coerce(ring, u), _coerce(ring, lam)
    return _specialize(_need_p(p), D, u, lam, ring)


def _need_p(p):
    if not p:
        raise ValueError("the prime p must be given")
    return p


def _coerce(ring, x):
    if isinstance(ring, (type(ZZ), type(QQ), LocalRing)):
        return ring.coerce(x)
    return ring.coerce(x)


def ep_vector(a, lam, D: int = DEFAULT_DEGREE, p: int | None = None, ring=None) -> TruncSeries:
    """prod_l E_p(a_l, lam^(p^l), T^(p^l)) modulo T^(D+1)."""
    if isinstance(a, WittVector):
        ring = ring or a.ring
        p = p or a.p
        coords = list(a.coords)
    else:
        coords = list(a)
        ring = ring or _ring_for(lam, *coords) or LocalRing(_need_p(p))
        p = p or ring.p
    p = _need_p(p)
    out = TruncSeries.one(ring, D)
    lam = _coerce(ring, lam)
    lam_l = lam
    for l, al in enumerate(coords):
        q = p ** l
        if q > D:
            break
        if l:
            lam_l = lam_l ** p
        al = _coerce(ring, al)
        if _exact_zero(al):
            continue
        out = out * _specialize(p, D // q, al, lam_l, ring).stretch(q, D)
    return out


@dataclass(frozen=True)
class TruncationLevel:
    """Level (L, M, N) with degree bound B = (N-1)(p^M - 1)/(p - 1) + (L - 1)."""

    L: int
    M: int
    N: int
    p: int

    @property
    def B(self) -> int:
        return (self.N - 1) * (self.p ** self.M - 1) // (self.p - 1) + (self.L - 1)


def ep_truncated(a, lam, level: TruncationLevel, ring=None) -> TruncSeries:
    """Truncation at degree B of E_p(a, lam, T): a polynomial of degree at most B."""
    return ep_vector(a, lam, level.B, level.p, ring)


def degree_support_check(level: TruncationLevel, margin: int | None = None, budget: int = 200_000,
                         report: dict | None = None) -> bool:
    """Does E_p(U, L, T) vanish above degree B modulo (L^L, U_0^N, ..., U_{M-1}^N, U_M, ...)?

    If ``report`` is a dict it receives the degree-B coefficient (for the
    sharpness probe) and the highest nonzero degree found.
    """
    p, B = level.p, level.B
    margin = max(2 * B + p, 4) if margin is None else margin
    D = B + margin
    names = ["L"] + [f"U{i}" for i in range(level.M)]
    exps = {"L": level.L}
    exps.update({f"U{i}": level.N for i in range(level.M)})
    ring = PolyRing.nilpotent(names, exps, coeffs=LocalRing(p), p=p)
    U = [ring.var(f"U{i}") for i in range(level.M)]
    series = ep_vector(U, ring.var("L"), D, p, ring)
    for c in series.coeffs:
        if len(c.terms) > budget:
            raise ResourceBudgetExceeded("degree support check exceeded its term budget")
    top = series.degree()
    if report is not None:
        report.update({"B": B, "checked_to": D, "top_degree": top, "coefficient_at_B": str(series[B])})
    return top <= B


# ---------------------------------------------------------------------------
# harmonic decomposition


def harmonic_decompose(G: TruncSeries, lam, p: int) -> dict:
    """Factor G = prod_{k prime to p} E_p(a_k, lam, T^k) to degree G.D; returns {k: a_k}."""
    ring, D = G.ring, G.D
    if not ring.is_zero(G[0] - ring.one):
        raise ValueError("series must have constant term 1")
    lam = _coerce(ring, lam)
    H = G
    b = {}
    for n in range(1, D + 1):
        bn = H[n]
        b[n] = bn
        if ring.is_zero(bn):
            continue
        v = vp(n, p)
        factor = _specialize(p, D // n, bn, lam ** (p ** v), ring).stretch(n, D)
        H = H * factor.inverse()
    out = {}
    for k in range(1, D + 1):
        if k % p == 0:
            continue
        coords = []
        m = k
        while m <= D:
            coords.append(b[m])
            m *= p
        out[k] = WittVector(ring, p, coords)
    return out


def harmonic_reconstruct(parts: Mapping[int, WittVector], lam, p: int, D: int, ring) -> TruncSeries:
    out = TruncSeries.one(ring, D)
    for k, a in sorted(parts.items()):
        if a.is_zero():
            continue
        out = out * ep_vector(a, lam, D // k, p, ring).stretch(k, D)
    return out


def artin_hasse_oracle(p: int, D: int) -> list:
    """Classical Artin-Hasse coefficients from prod_k exp(T^(p^k)/p^k), by Taylor series."""
    out = [Fraction(0)] * (D + 1)
    out[0] = Fraction(1)
    k = 0
    while p ** k <= D:
        q = p ** k
        factor = [Fraction(0)] * (D + 1)
        j, fact = 0, 1
        while j * q <= D:
            factor[j * q] = Fraction(1, fact * q ** j)
            j += 1
            fact *= j
        out = [sum(out[i] * factor[n - i] for i in range(n + 1)) for n in range(D + 1)]
        k += 1
    return out
