"""p-typical Witt vectors over the backends of :mod:`wittkit.ring`.

Arithmetic specializes universal integer polynomials (sums, products,
Frobenius, negation and the two-variable ``T`` map) computed once per
prime by ghost-component lifting.  Because arithmetic never divides by
``p`` after the kernel is built, it works over rings with p-torsion and
over Eisenstein rings at finite precision.

A :class:`WittVector` is either *exact* (finite support, ``horizon`` is
``None``) or known only below an index ``horizon``; every operation
propagates the smallest horizon of its inputs.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .ring import (
    ZZ, EisensteinElem, EisensteinRing, LocalRing, MultiPoly, NotDivisible, NotIntegral,
    PolyRing, ResourceBudgetExceeded, _ring_of,
)

__all__ = [
    "WittKernel", "kernel", "WittVector", "GhostVector", "TruncationClass",
    "ghost", "ghost_lift", "ghost_polynomials",
    "witt_add", "witt_sub", "witt_neg", "witt_mul", "frobenius", "verschiebung",
    "teichmuller", "teichmuller_scale", "t_map", "t_map_by_sum", "f_lambda",
    "scalar_mul", "scalar_div", "integer_vector", "module_structure",
    "in_truncation_class", "support_probe", "CONFIG",
]

#: Tunables.  ``max_depth[p]`` caps the number of coordinates any operation
#: computes; ``slack`` is how far past the longest input sums and products go.
CONFIG = {"slack": 2, "max_depth": {2: 5, 3: 4}, "default_max_depth": 3, "probe_term_budget": 200_000}


def max_depth(p: int) -> int:
    return CONFIG["max_depth"].get(p, CONFIG["default_max_depth"])


# ---------------------------------------------------------------------------
# ghost components and lifting


def ghost_polynomials(p: int, depth: int, ring: PolyRing, prefix: str = "X"):
    """Phi_0..Phi_depth in the variables prefix0, prefix1, ... of ``ring``."""
    zs = [ring.var(f"{prefix}{i}") for i in range(depth + 1)]
    return [sum((zs[i] ** (p ** (r - i)) * p ** i for i in range(r + 1)), ring.zero) for r in range(depth + 1)]


def _ghost_values(p, coords, depth, one_zero):
    out = []
    for r in range(depth + 1):
        acc = one_zero
        for i in range(r + 1):
            c = coords[i]
            if _exact_zero(c):
                continue
            acc = acc + (c ** (p ** (r - i))) * (p ** i)
        out.append(acc)
    return out


def ghost_lift(values: Sequence, p: int, ring=None) -> "WittVector":
    """Triangular solve of Phi_r(w) = values[r]; raises NotIntegral on a failed division by p^r."""
    if ring is None:
        ring = _ring_of(values[0]) if values else ZZ
    w = []
    for r, g in enumerate(values):
        acc = ring.coerce(g) if not isinstance(g, (int, Fraction)) or isinstance(ring, (PolyRing, EisensteinRing)) else g
        for i in range(r):
            if _exact_zero(w[i]):
                continue
            acc = acc - (w[i] ** (p ** (r - i))) * (p ** i)
        try:
            w.append(ring.exact_div(acc, p ** r) if r else acc)
        except NotDivisible as exc:
            raise NotIntegral(f"ghost lift fails at index {r}: {exc}") from None
    return WittVector(ring, p, w, horizon=len(w))


# ---------------------------------------------------------------------------
# universal polynomials


class WittKernel:
    """Cached universal polynomials S_r, P_r, F_r, N_r (negation) and T_r(Y, X) over Z."""

    def __init__(self, p: int):
        self.p = p
        self.depth = -1
        self.ring = None
        self.S, self.P, self.F, self.N, self.T = [], [], [], [], []
        self._lock = threading.Lock()

    def ensure(self, r: int) -> "WittKernel":
        if r <= self.depth:
            return self
        with self._lock:
            if r > self.depth:
                self._build(r)
        return self

    def _build(self, R: int):
        p = self.p
        names = [f"X{i}" for i in range(R + 2)] + [f"Y{i}" for i in range(R + 2)]
        ring = PolyRing(names, ZZ, p=p)
        phx = ghost_polynomials(p, R + 1, ring, "X")
        phy = ghost_polynomials(p, R + 1, ring, "Y")
        ys = [ring.var(f"Y{i}") for i in range(R + 1)]

        def lift(targets):
            return list(ghost_lift(targets, p, ring).coords)

        S = lift([phx[r] + phy[r] for r in range(R + 1)])
        P = lift([phx[r] * phy[r] for r in range(R + 1)])
        F = lift([phx[r + 1] for r in range(R + 1)])
        N = lift([-phx[r] for r in range(R + 1)])
        T = lift([sum((ys[i] ** (p ** (r - i)) * phx[r - i] * p ** i for i in range(r + 1)), ring.zero)
                  for r in range(R + 1)])
        self.ring, self.S, self.P, self.F, self.N, self.T = ring, S, P, F, N, T
        self.depth = R

    def table(self) -> dict:
        """JSON-friendly export of every cached polynomial."""
        return {
            "p": self.p, "depth": self.depth,
            **{name: [str(f) for f in getattr(self, name)] for name in ("S", "P", "F", "N", "T")},
        }

    def _eval(self, polys, xs, ys, ring):
        R = self.depth
        vals = list(xs[: R + 2]) + [ring.zero] * (R + 2 - len(xs[: R + 2]))
        vals += list(ys[: R + 2]) + [ring.zero] * (R + 2 - len(ys[: R + 2]))
        return _eval_shared(polys, vals, ring)


_KERNELS: dict = {}
_KLOCK = threading.Lock()


def kernel(p: int, depth: int = 0) -> WittKernel:
    with _KLOCK:
        k = _KERNELS.get(p)
        if k is None:
            k = _KERNELS[p] = WittKernel(p)
    return k.ensure(depth)


def _exact_zero(x) -> bool:
    if isinstance(x, (int, Fraction)):
        return x == 0
    if isinstance(x, EisensteinElem):
        return x.prec >= x.ring.N and not any(x.c)
    if isinstance(x, MultiPoly):
        return not x.terms
    return False


def _eval_shared(polys, vals, ring):
    """Evaluate several integer polynomials at one point, sharing powers."""
    zero_idx = {i for i, v in enumerate(vals) if _exact_zero(v)}
    cache = {}
    scalar = isinstance(ring, (type(ZZ),)) or not isinstance(ring, (PolyRing, EisensteinRing))
    coerced = {}

    def pw(i, k):
        key = (i, k)
        r = cache.get(key)
        if r is None:
            r = vals[i] if k == 1 else pw(i, k // 2) * pw(i, k - k // 2)
            cache[key] = r
        return r

    out = []
    for f in polys:
        acc = ring.zero
        for e, c in f.terms.items():
            term = None
            dead = False
            for i, k in enumerate(e):
                if k:
                    if i in zero_idx:
                        dead = True
                        break
                    t = pw(i, k)
                    term = t if term is None else term * t
            if dead:
                continue
            if not scalar:
                cc = coerced.get(c)
                if cc is None:
                    cc = coerced[c] = ring.coerce(c)
            else:
                cc = c
            if term is None:
                acc = acc + cc
            elif c == 1:
                acc = acc + term
            elif c == -1:
                acc = acc - term
            else:
                acc = acc + term * cc
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# vectors


class WittVector:
    """Finite-support Witt vector (``horizon is None``) or a vector known below ``horizon``."""

    __slots__ = ("ring", "p", "coords", "horizon")

    def __init__(self, ring, p: int, coords: Sequence = (), horizon: int | None = None):
        cs = [ring.coerce(c) if not isinstance(ring, type(ZZ)) or not isinstance(c, int) else c for c in coords]
        if horizon is not None:
            cs = cs[:horizon]
        while cs and _exact_zero(cs[-1]):
            cs.pop()
        self.ring = ring
        self.p = p
        self.coords = tuple(cs)
        self.horizon = horizon

    @classmethod
    def zero(cls, ring, p):
        return cls(ring, p, ())

    def __getitem__(self, i: int):
        if i < len(self.coords):
            return self.coords[i]
        if self.horizon is not None and i >= self.horizon:
            raise IndexError(f"coordinate {i} is beyond the computed horizon {self.horizon}")
        return self.ring.zero

    def __len__(self):
        return len(self.coords)

    def known(self) -> int:
        """Number of coordinates that are known (infinite for exact vectors is reported as len)."""
        return len(self.coords) if self.horizon is None else self.horizon

    def is_exact(self) -> bool:
        return self.horizon is None

    def padded(self, n: int) -> list:
        return [self[i] for i in range(n)]

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(c) for c in self.coords)

    def equals(self, other: "WittVector", upto: int | None = None) -> bool:
        """Coordinatewise equality on the common known range (or up to ``upto``)."""
        n = max(len(self.coords), len(other.coords))
        lims = [h for h in (self.horizon, other.horizon, upto) if h is not None]
        if lims:
            n = min(lims)
        return all(self.ring.is_zero(self[i] - other[i]) for i in range(n))

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def __add__(self, o):
        return witt_add(self, o)

    def __sub__(self, o):
        return witt_sub(self, o)

    def __neg__(self):
        return witt_neg(self)

    def __mul__(self, o):
        if isinstance(o, int):
            return witt_mul(integer_vector(o, self.p, self.ring, self.known() + 1), self)
        return witt_mul(self, o)

    __rmul__ = __mul__

    def to_json(self):
        d = {"coords": [self.ring.fmt(c) for c in self.coords]}
        if self.horizon is not None:
            d["horizon"] = self.horizon
        return d

    def __repr__(self):
        body = ", ".join(self.ring.fmt(c) for c in self.coords)
        tail = "" if self.horizon is None else f"; known below {self.horizon}"
        return f"W({body}{tail})"


@dataclass(frozen=True)
class GhostVector:
    ring: object
    values: tuple

    def __getitem__(self, r):
        return self.values[r]

    def __len__(self):
        return len(self.values)


def _coerce_vec(x, ring=None, p=None) -> WittVector:
    if isinstance(x, WittVector):
        return x
    if ring is None or p is None:
        raise TypeError("need a WittVector")
    return WittVector(ring, p, x)


def ghost(w: WittVector, depth: int) -> GhostVector:
    if w.horizon is not None and depth >= w.horizon:
        raise IndexError("ghost depth beyond the vector's horizon")
    vals = _ghost_values(w.p, w.padded(depth + 1), depth, w.ring.zero)
    return GhostVector(w.ring, tuple(vals))


def _result_depth(p, inputs, requested, extra=0):
    if requested is None:
        requested = max((len(v.coords) for v in inputs), default=0) + CONFIG["slack"] + extra
    cap = max_depth(p)
    n = min(requested, cap)
    for v in inputs:
        if v.horizon is not None:
            n = min(n, v.horizon - extra)
    return max(n, 0), requested


def _finish(ring, p, coords, n, requested, omega=None):
    """Decide whether the computed coordinates describe the vector exactly."""
    horizon = n
    if isinstance(ring, EisensteinRing) and omega is not None and omega > 0:
        if p ** n * omega >= ring.N:
            horizon = None
    return WittVector(ring, p, coords, horizon)


def _omega(v: WittVector):
    """Lower bound of v_pi(x_i)/p^i over all i (Eisenstein, exact vectors only)."""
    if v.horizon is not None or not isinstance(v.ring, EisensteinRing):
        return None
    best = None
    for i, c in enumerate(v.coords):
        if _exact_zero(c):
            continue
        val = c._val()
        w = Fraction(val, v.p ** i)
        best = w if best is None else min(best, w)
    return best if best is not None else Fraction(10 ** 9)


def _min_opt(*xs):
    if any(x is None for x in xs):
        return None
    return min(xs)


def _check_same(x: WittVector, y: WittVector):
    if x.p != y.p:
        raise ValueError("Witt vectors for different primes")
    if x.ring != y.ring:
        raise ValueError("Witt vectors over different rings")


def _binary(x, y, table, depth, omega):
    _check_same(x, y)
    p = x.p
    n, req = _result_depth(p, (x, y), depth)
    if x.horizon is None and y.horizon is None and not x.coords and not y.coords:
        return WittVector(x.ring, p, ())
    k = kernel(p, max(n - 1, 0))
    coords = k._eval(table(k)[:n], x.padded(min(n, x.known()) if x.horizon is not None else n),
                     y.padded(min(n, y.known()) if y.horizon is not None else n), x.ring)
    return _finish(x.ring, p, coords, n, req, omega)


def witt_add(x: WittVector, y: WittVector, depth: int | None = None) -> WittVector:
    if x.horizon is None and not x.coords:
        return y if depth is None else _truncate(y, depth)
    if y.horizon is None and not y.coords:
        return x if depth is None else _truncate(x, depth)
    om = _min_opt(_omega(x), _omega(y))
    return _binary(x, y, lambda k: k.S, depth, om)


def witt_neg(x: WittVector, depth: int | None = None) -> WittVector:
    p = x.p
    if p != 2:
        return WittVector(x.ring, p, [-c for c in x.coords], x.horizon)
    if x.horizon is None and not x.coords:
        return x
    n, req = _result_depth(p, (x,), depth)
    k = kernel(p, max(n - 1, 0))
    coords = k._eval(k.N[:n], x.padded(min(n, x.known())), [], x.ring)
    return _finish(x.ring, p, coords, n, req, _omega(x))


def witt_sub(x: WittVector, y: WittVector, depth: int | None = None) -> WittVector:
    return witt_add(x, witt_neg(y, depth), depth)


def witt_mul(x: WittVector, y: WittVector, depth: int | None = None) -> WittVector:
    _check_same(x, y)
    if (x.horizon is None and not x.coords) or (y.horizon is None and not y.coords):
        return WittVector(x.ring, x.p, ())
    ox, oy = _omega(x), _omega(y)
    om = None if ox is None or oy is None else ox + oy
    return _binary(x, y, lambda k: k.P, depth, om)


def _truncate(x: WittVector, depth: int) -> WittVector:
    if x.horizon is None and len(x.coords) <= depth:
        return x
    return WittVector(x.ring, x.p, x.coords[:depth], depth if x.horizon is None else min(depth, x.horizon))


def frobenius(x: WittVector, depth: int | None = None) -> WittVector:
    p = x.p
    if x.horizon is None and not x.coords:
        return x
    if x.horizon is None and len(x.coords) == 1:
        return WittVector(x.ring, p, [x.coords[0] ** p])  # F[a] = [a^p]
    n, req = _result_depth(p, (x,), depth, extra=1)
    k = kernel(p, max(n - 1, 0))
    src = x.padded(min(n + 1, x.known()) if x.horizon is not None else n + 1)
    coords = k._eval(k.F[:n], src, [], x.ring)
    om = _omega(x)
    return _finish(x.ring, p, coords, n, req, None if om is None else om * p)


def verschiebung(x: WittVector) -> WittVector:
    h = None if x.horizon is None else x.horizon + 1
    return WittVector(x.ring, x.p, [x.ring.zero] + list(x.coords), h)


def teichmuller(a, p: int, ring=None) -> WittVector:
    ring = ring or _ring_of(a)
    return WittVector(ring, p, [ring.coerce(a) if not isinstance(ring, type(ZZ)) else a])


def teichmuller_scale(a, x: WittVector) -> WittVector:
    """[a] * x computed coordinatewise: (a x_0, a^p x_1, a^(p^2) x_2, ...)."""
    p = x.p
    out, ap = [], a
    for c in x.coords:
        out.append(ap * c)
        ap = ap ** p
    return WittVector(x.ring, p, out, x.horizon)


def scalar_mul(lam, x: WittVector) -> WittVector:
    """Coordinatewise scaling lam.(x_0, x_1, ...) = (lam x_0, lam x_1, ...)."""
    return WittVector(x.ring, x.p, [lam * c for c in x.coords], x.horizon)


def scalar_div(x: WittVector, lam) -> WittVector:
    """Coordinatewise exact division by ``lam``; raises NotDivisible."""
    return WittVector(x.ring, x.p, [x.ring.exact_div(c, lam) for c in x.coords], x.horizon)


def t_map(a: WittVector, x: WittVector, depth: int | None = None) -> WittVector:
    """T_a x = sum_r V^r([a_r] x), via the universal polynomials T_r(Y=a, X=x)."""
    _check_same(a, x)
    p = x.p
    if (a.horizon is None and not a.coords) or (x.horizon is None and not x.coords):
        return WittVector(x.ring, p, ())
    if a.horizon is None and len(a.coords) == 1:
        return teichmuller_scale(a.coords[0], x)
    if depth is None:
        depth = len(a.coords) + len(x.coords) + CONFIG["slack"]
    n, req = _result_depth(p, (a, x), depth)
    k = kernel(p, max(n - 1, 0))
    coords = k._eval(k.T[:n], x.padded(min(n, x.known())), a.padded(min(n, a.known())), x.ring)
    oa, ox = _omega(a), _omega(x)
    om = None
    if oa is not None and ox is not None:
        om = min(Fraction(a[i]._val() if not _exact_zero(a[i]) else 10 ** 9, p ** i) + ox for i in range(len(a.coords)))
    return _finish(x.ring, p, coords, n, req, om)


def t_map_by_sum(a: WittVector, x: WittVector, depth: int | None = None) -> WittVector:
    """Independent evaluation of T_a x as an explicit sum of V^r([a_r] x)."""
    acc = WittVector(x.ring, x.p, ())
    for r, ar in enumerate(a.coords):
        term = teichmuller_scale(ar, x)
        for _ in range(r):
            term = verschiebung(term)
        acc = witt_add(acc, term, depth)
    return acc


def f_lambda(x: WittVector, lam, depth: int | None = None) -> WittVector:
    """F^lambda x = F(x) - [lambda^(p-1)] x."""
    p = x.p
    fx = frobenius(x, depth)
    tx = teichmuller_scale(lam ** (p - 1), x)
    if fx.horizon is not None:
        tx = _truncate(tx, fx.horizon)
    return witt_sub(fx, tx, depth if depth is not None else (fx.horizon if fx.horizon is not None else None))


def integer_vector(m: int, p: int, ring=None, depth: int | None = None) -> WittVector:
    """Image of the integer m in W(ring), to the given number of coordinates."""
    ring = ring or ZZ
    depth = max_depth(p) if depth is None else min(depth, max_depth(p) + 2)
    w = ghost_lift([m] * depth, p, ZZ)
    coords = [ring.coerce(c) if not isinstance(ring, type(ZZ)) else c for c in w.coords]
    return WittVector(ring, p, coords, depth)


# ---------------------------------------------------------------------------
# module structure of W over W^Lambda


def module_structure(r: int, p: int):
    """(S'_r, P'_r) with S_r(L u, L v) = L S'_r(u, v) and P_r(L a, L u) = L P'_r(a, u)."""
    k = kernel(p, r)
    names = ["L"] + [f"u{i}" for i in range(r + 1)] + [f"v{i}" for i in range(r + 1)] + [f"a{i}" for i in range(r + 1)]
    ring = PolyRing(names, ZZ, p=p)
    L = ring.var("L")
    u = [L * ring.var(f"u{i}") for i in range(r + 1)]
    v = [L * ring.var(f"v{i}") for i in range(r + 1)]
    a = [L * ring.var(f"a{i}") for i in range(r + 1)]
    s_num = k._eval([k.S[r]], u, v, ring)[0]
    p_num = k._eval([k.P[r]], a, u, ring)[0]
    return s_num.exact_div(L), p_num.exact_div(L)


# ---------------------------------------------------------------------------
# truncation classes


@dataclass(frozen=True)
class TruncationClass:
    """W_{M,N,lam}: coordinates vanish from index M on and a_i^N is divisible by lam (lam = 0: a_i^N = 0)."""

    M: int
    N: int
    lam: object = 0


def in_truncation_class(x: WittVector, c: TruncationClass) -> bool:
    if x.horizon is not None and x.horizon < c.M:
        raise IndexError("vector not known far enough to decide membership")
    ring = x.ring
    for i, a in enumerate(x.coords):
        if ring.is_zero(a):
            continue
        if i >= c.M:
            return False
        power = a ** c.N
        if _exact_zero(c.lam) or (not isinstance(c.lam, (int, Fraction)) and ring.is_zero(c.lam)):
            if not ring.is_zero(power):
                return False
            continue
        try:
            ring.exact_div(power, c.lam)
        except (NotDivisible, NotIntegral):
            return False
    return True


# ---------------------------------------------------------------------------
# empirical support and nilpotency probe


def _nilpotency_index(c, budget: int) -> int:
    if c.is_zero():
        return 1
    k, acc = 1, c
    while not acc.is_zero():
        acc = acc * c
        k += 1
        if len(acc.terms) > budget:
            raise ResourceBudgetExceeded("nilpotency probe exceeded its term budget")
        if k > 10_000:
            raise ResourceBudgetExceeded("element does not appear nilpotent")
    return k


def support_probe(op: str, M: int, N: int, p: int, a_len: int | None = None, budget: int | None = None):
    """Smallest (M', N') such that ``op`` maps the universal point of hat-W_{M,N} into hat-W_{M',N'}.

    The universal point lives over Z_(p)[x_ij]/(x_ij^N).  Coordinates are
    computed up to the first index where an isobaric weight count proves they
    vanish, so the reported M' is exact for the probed operation.
    ``op`` is one of ``"add"``, ``"f_lambda"``, ``"t_map"``.
    """
    budget = budget or CONFIG["probe_term_budget"]
    if op not in ("add", "f_lambda", "t_map"):
        raise ValueError(f"unknown operation {op!r}")
    n_inputs = 2 if op == "add" else 1
    xs = [[f"x{j}_{i}" for i in range(M)] for j in range(n_inputs)]
    extra = []
    if op == "f_lambda":
        extra = ["lam"]
    a_len = M if a_len is None else a_len
    if op == "t_map":
        extra = [f"a{i}" for i in range(a_len)]
    variables = [v for row in xs for v in row] + extra
    ring = PolyRing.nilpotent(variables, {v: N for row in xs for v in row}, coeffs=LocalRing(p), p=p)
    weight = n_inputs * (N - 1) * sum(p ** i for i in range(M))
    if weight == 0:
        return (1, 1)
    top = 0
    while p ** (top + 1) <= weight:
        top += 1
    if op == "t_map":
        top += max(a_len - 1, 0)
    n = top + 1
    if n > max_depth(p) + 2:
        raise ResourceBudgetExceeded(f"probe needs {n} coordinates; raise CONFIG['max_depth']")
    vecs = [WittVector(ring, p, [ring.var(v) for v in row]) for row in xs]
    saved = dict(CONFIG["max_depth"])
    CONFIG["max_depth"][p] = max(max_depth(p), n)
    try:
        if op == "add":
            out = witt_add(vecs[0], vecs[1], depth=n)
        elif op == "f_lambda":
            out = f_lambda(vecs[0], ring.var("lam"), depth=n)
        else:
            a = WittVector(ring, p, [ring.var(v) for v in extra])
            out = t_map(a, vecs[0], depth=n)
    finally:
        CONFIG["max_depth"].clear()
        CONFIG["max_depth"].update(saved)
    coords = out.padded(min(n, out.known()))
    for c in coords:
        if len(c.terms) > budget:
            raise ResourceBudgetExceeded("probe exceeded its term budget")
    nz = [i for i, c in enumerate(coords) if not c.is_zero()]
    m_prime = max(1, (nz[-1] + 1) if nz else 1)
    n_prime = max([1] + [_nilpotency_index(c, budget) for c in coords])
    return (m_prime, n_prime)
