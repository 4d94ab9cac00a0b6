"""Exact coefficient rings.

Backends: the integers, the rationals, the p-local rationals Z_(p), the
Eisenstein local rings Z_p[pi]/(pi^e - p) at a fixed p-adic precision, and
sparse multivariate polynomial rings over any of these, optionally taken
modulo monomial rewrite rules.

Ring elements of the scalar backends are plain ``int``/``Fraction`` values;
Eisenstein elements and polynomials are immutable objects with operator
overloading.  Every ring object exposes the same small protocol::

    zero, one, coerce(x), is_zero(x), is_exact_zero(x), exact_div(a, b),
    fmt(x), parse(text), describe()
"""

from __future__ import annotations

import ast
import math
import operator
import re
from fractions import Fraction
from functools import reduce
from typing import Iterable, Mapping, Sequence

__all__ = [
    "NotDivisible", "NotIntegral", "PrecisionExhausted", "ResourceBudgetExceeded",
    "AT_LEAST_PRECISION", "vp", "PLocalRational",
    "ZZ", "QQ", "IntegerRing", "RationalRing", "LocalRing",
    "EisensteinRing", "EisensteinElem", "PolyRing", "MultiPoly",
    "ring_exact_div", "ring_valuation", "ring_from_description",
]


class NotDivisible(ArithmeticError):
    """An exact division was requested but the divisor does not divide."""


class NotIntegral(ArithmeticError):
    """A value left the coefficient domain (e.g. a denominator divisible by p)."""


class PrecisionExhausted(ArithmeticError):
    """The tracked p-adic precision is too small to certify the result."""


class ResourceBudgetExceeded(RuntimeError):
    """A symbolic expansion exceeded its configured term budget."""


class _AtLeastPrecision:
    __slots__ = ()

    def __repr__(self):
        return "at-least-precision"

    __str__ = __repr__


AT_LEAST_PRECISION = _AtLeastPrecision()


def vp(x, p: int) -> int:
    """p-adic valuation of a nonzero integer or fraction."""
    if isinstance(x, Fraction):
        return vp(x.numerator, p) - vp(x.denominator, p)
    x = int(x)
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _canon(q):
    if isinstance(q, Fraction) and q.denominator == 1:
        return q.numerator
    return q


# ---------------------------------------------------------------------------
# scalar rings


class PLocalRational:
    """An element of Z_(p): a reduced fraction whose denominator is prime to p."""

    __slots__ = ("numerator", "denominator", "prime")

    def __init__(self, value, p: int):
        f = Fraction(value)
        if f.denominator % p == 0:
            raise NotIntegral(f"{f} is not in Z_({p})")
        self.numerator = f.numerator
        self.denominator = f.denominator
        self.prime = p

    def _f(self):
        return Fraction(self.numerator, self.denominator)

    def _other(self, o):
        if isinstance(o, PLocalRational):
            if o.prime != self.prime:
                raise ValueError("mixed primes")
            return o._f()
        return Fraction(o)

    def __add__(self, o):
        return PLocalRational(self._f() + self._other(o), self.prime)

    __radd__ = __add__

    def __sub__(self, o):
        return PLocalRational(self._f() - self._other(o), self.prime)

    def __rsub__(self, o):
        return PLocalRational(self._other(o) - self._f(), self.prime)

    def __mul__(self, o):
        return PLocalRational(self._f() * self._other(o), self.prime)

    __rmul__ = __mul__

    def __neg__(self):
        return PLocalRational(-self._f(), self.prime)

    def __pow__(self, n: int):
        return PLocalRational(self._f() ** n, self.prime)

    def __eq__(self, o):
        try:
            return self._f() == self._other(o)
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash(self._f())

    def valuation(self):
        return AT_LEAST_PRECISION if self.numerator == 0 else vp(self.numerator, self.prime)

    def exact_div(self, o):
        b = self._other(o)
        if b == 0:
            raise NotDivisible("division by zero")
        q = self._f() / b
        if q.denominator % self.prime == 0:
            raise NotDivisible(f"{self} / {o} leaves Z_({self.prime})")
        return PLocalRational(q, self.prime)

    def __repr__(self):
        return f"PLocalRational({self._f()}, p={self.prime})"

    def __str__(self):
        return str(self._f())


class _ScalarRing:
    """Shared protocol for rings whose elements are ``int``/``Fraction``."""

    zero = 0
    one = 1
    p = None

    def is_zero(self, x) -> bool:
        return x == 0

    is_exact_zero = is_zero

    def fmt(self, x) -> str:
        return str(x)

    def parse(self, text: str):
        return _parse_expr(str(text), self)

    def var(self, name):
        raise KeyError(f"ring {self!r} has no variable {name!r}")

    def __eq__(self, other):
        return type(self) is type(other) and self.p == other.p

    def __hash__(self):
        return hash((type(self).__name__, self.p))


class IntegerRing(_ScalarRing):
    name = "ZZ"

    def coerce(self, x):
        if isinstance(x, bool):
            return int(x)
        if isinstance(x, int):
            return x
        if isinstance(x, PLocalRational):
            x = x._f()
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise NotIntegral(f"{x} is not an integer")
            return x.numerator
        raise TypeError(f"cannot coerce {x!r} into ZZ")

    def contains(self, x) -> bool:
        return Fraction(x).denominator == 1

    def exact_div(self, a, b):
        if b == 0:
            raise NotDivisible("division by zero")
        q, r = divmod(a, b)
        if r:
            raise NotDivisible(f"{b} does not divide {a}")
        return q

    def describe(self):
        return {"kind": "poly", "coeffs": "ZZ", "vars": []}

    def __repr__(self):
        return "ZZ"


class RationalRing(_ScalarRing):
    name = "QQ"

    def coerce(self, x):
        if isinstance(x, PLocalRational):
            x = x._f()
        if isinstance(x, (int, Fraction)):
            return _canon(Fraction(x))
        raise TypeError(f"cannot coerce {x!r} into QQ")

    def contains(self, x) -> bool:
        return True

    def exact_div(self, a, b):
        if b == 0:
            raise NotDivisible("division by zero")
        return _canon(Fraction(a) / b)

    def describe(self):
        return {"kind": "poly", "coeffs": "QQ", "vars": []}

    def __repr__(self):
        return "QQ"


class LocalRing(_ScalarRing):
    """Z_(p); elements are stored as ``int``/``Fraction`` with p-free denominators."""

    def __init__(self, p: int):
        self.p = p
        self.name = f"ZZ_({p})"

    def coerce(self, x):
        if isinstance(x, PLocalRational):
            x = x._f()
        if not isinstance(x, (int, Fraction)):
            raise TypeError(f"cannot coerce {x!r} into {self.name}")
        x = _canon(Fraction(x))
        if isinstance(x, Fraction) and x.denominator % self.p == 0:
            raise NotIntegral(f"{x} is not in {self.name}")
        return x

    def contains(self, x) -> bool:
        return Fraction(x).denominator % self.p != 0

    def exact_div(self, a, b):
        if b == 0:
            raise NotDivisible("division by zero")
        q = Fraction(a) / b
        if q.denominator % self.p == 0:
            raise NotDivisible(f"{a}/{b} is not in {self.name}")
        return _canon(q)

    def element(self, x) -> PLocalRational:
        return PLocalRational(x, self.p)

    def describe(self):
        return {"kind": "poly", "coeffs": "ZZp", "p": self.p, "vars": []}

    def __repr__(self):
        return self.name


ZZ = IntegerRing()
QQ = RationalRing()


# ---------------------------------------------------------------------------
# Eisenstein local rings


class EisensteinRing:
    """Z_p[pi]/(pi^e - p) computed modulo p^K = pi^(eK).

    Elements carry a ``prec`` field: the element is known modulo pi^prec.
    """

    def __init__(self, p: int, e: int, K: int):
        if p < 2 or e < 1 or K < 1:
            raise ValueError("need p >= 2, e >= 1, K >= 1")
        self.p, self.e, self.K = p, e, K
        self.N = e * K
        self.modulus = p ** K
        self.zero = EisensteinElem(self, (0,) * e, self.N)
        self.one = self.coerce(1)
        self.pi = EisensteinElem(self, (0, 1) + (0,) * (e - 2), self.N) if e > 1 else self.coerce(p)

    def __eq__(self, other):
        return isinstance(other, EisensteinRing) and (self.p, self.e, self.K) == (other.p, other.e, other.K)

    def __hash__(self):
        return hash(("eis", self.p, self.e, self.K))

    def __repr__(self):
        return f"EisensteinRing(p={self.p}, e={self.e}, K={self.K})"

    def coerce(self, x) -> "EisensteinElem":
        if isinstance(x, EisensteinElem):
            if x.ring != self:
                raise ValueError("element of a different Eisenstein ring")
            return x
        if isinstance(x, PLocalRational):
            x = x._f()
        if isinstance(x, bool):
            x = int(x)
        if isinstance(x, int):
            return EisensteinElem(self, (x,) + (0,) * (self.e - 1), self.N)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise NotIntegral(f"{x} is not p-integral")
            inv = pow(x.denominator, -1, self.modulus)
            return self.coerce(x.numerator * inv)
        raise TypeError(f"cannot coerce {x!r} into {self!r}")

    def pi_power(self, k: int) -> "EisensteinElem":
        q, r = divmod(k, self.e)
        c = [0] * self.e
        c[r] = self.p ** q
        return EisensteinElem(self, tuple(c), self.N)

    def from_digits(self, digits: Sequence[int]) -> "EisensteinElem":
        """Sum of digits[k] * pi^k."""
        acc = self.zero
        for k, d in enumerate(digits):
            if d:
                acc = acc + self.pi_power(k) * d
        return acc

    def var(self, name):
        if name in ("pi", "π"):
            return self.pi
        raise KeyError(f"unknown symbol {name!r} in {self!r}")

    def is_zero(self, x) -> bool:
        return self.coerce(x).is_zero()

    def is_exact_zero(self, x) -> bool:
        x = self.coerce(x)
        return x.prec >= self.N and not any(x.c)

    def exact_div(self, a, b):
        return self.coerce(a).exact_div(b)

    def valuation(self, a):
        return self.coerce(a).valuation()

    def fmt(self, x) -> str:
        return str(self.coerce(x))

    def parse(self, text: str):
        text = str(text)
        m = re.search(r"\+?\s*O\(\s*(?:pi|π)\s*(?:\^|\*\*)\s*(\d+)\s*\)\s*$", text)
        prec = None
        if m:
            prec = int(m.group(1))
            text = text[: m.start()].strip() or "0"
        val = _parse_expr(text, self)
        if prec is not None:
            val = val.with_prec(prec)
        return val

    def describe(self):
        return {"kind": "eisenstein", "p": self.p, "e": self.e, "K": self.K}

    def random_element(self, rng, min_val: int = 0, digits: int | None = None):
        digits = self.N if digits is None else digits
        d = [0] * min_val + [rng.randrange(self.p) for _ in range(max(0, digits - min_val))]
        return self.from_digits(d)


class EisensteinElem:
    __slots__ = ("ring", "c", "prec")

    def __init__(self, ring: EisensteinRing, coeffs: Sequence[int], prec: int):
        prec = max(0, min(prec, ring.N))
        e, p = ring.e, ring.p
        out = []
        for j, cj in enumerate(coeffs):
            k = -(-(prec - j) // e)
            out.append(cj % p ** k if k > 0 else 0)
        self.ring = ring
        self.c = tuple(out)
        self.prec = prec

    # -- basic queries
    def valuation(self):
        """pi-adic valuation, or AT_LEAST_PRECISION if zero at the tracked precision."""
        v = self._val()
        return AT_LEAST_PRECISION if v >= self.prec else v

    def _val(self) -> int:
        best = self.prec
        for j, cj in enumerate(self.c):
            if cj:
                best = min(best, self.ring.e * vp(cj, self.ring.p) + j)
        return best

    def is_zero(self) -> bool:
        return not any(self.c)

    def __bool__(self):
        return any(self.c)

    def is_unit(self) -> bool:
        return self.prec > 0 and self.c[0] % self.ring.p != 0

    def with_prec(self, prec: int) -> "EisensteinElem":
        return EisensteinElem(self.ring, self.c, min(prec, self.prec))

    def digits(self, n: int | None = None) -> list[int]:
        """pi-adic digits in {0..p-1} of the canonical representative."""
        n = self.prec if n is None else min(n, self.prec)
        x, out = self, []
        for _ in range(n):
            d = x.c[0] % self.ring.p
            out.append(d)
            x = (x - d)
            if x.is_zero():
                break
            x = x.exact_div(self.ring.pi)
        return out

    # -- arithmetic
    def _co(self, o):
        if isinstance(o, EisensteinElem):
            if o.ring is not self.ring and o.ring != self.ring:
                raise ValueError("mixing Eisenstein rings")
            return o
        if isinstance(o, (int, Fraction, PLocalRational)):
            return self.ring.coerce(o)
        return None

    def __add__(self, o):
        o = self._co(o)
        if o is None:
            return NotImplemented
        return EisensteinElem(self.ring, [a + b for a, b in zip(self.c, o.c)], min(self.prec, o.prec))

    __radd__ = __add__

    def __neg__(self):
        return EisensteinElem(self.ring, [-a for a in self.c], self.prec)

    def __sub__(self, o):
        o = self._co(o)
        if o is None:
            return NotImplemented
        return EisensteinElem(self.ring, [a - b for a, b in zip(self.c, o.c)], min(self.prec, o.prec))

    def __rsub__(self, o):
        o = self._co(o)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, o):
        o = self._co(o)
        if o is None:
            return NotImplemented
        R = self.ring
        e, p = R.e, R.p
        prod = [0] * (2 * e - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    if b:
                        prod[i + j] += a * b
        for k in range(2 * e - 2, e - 1, -1):
            prod[k - e] += p * prod[k]
        va, vb = self._val(), o._val()
        prec = min(self.prec + vb, o.prec + va, R.N)
        return EisensteinElem(R, prod[:e], prec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.ring.one.exact_div(self) ** (-n)
        result, base = self.ring.one, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def _unit_inverse(self) -> "EisensteinElem":
        R = self.ring
        x = R.coerce(pow(self.c[0], -1, R.modulus))
        two = R.coerce(2)
        for _ in range(R.N.bit_length() + 2):
            x = x * (two - self * x)
        return EisensteinElem(R, x.c, self.prec)

    def exact_div(self, o) -> "EisensteinElem":
        o = self._co(o)
        R = self.ring
        m = o._val()
        if m >= o.prec:
            raise PrecisionExhausted("divisor is zero at its tracked precision")
        va = self._val()
        if va < m:
            raise NotDivisible(f"v({self}) = {va} < v({o}) = {m}")
        new_prec = min(self.prec - m, va + o.prec - 2 * m)
        if new_prec < 0:
            raise PrecisionExhausted("quotient precision would be negative")
        a = self._shift_down(m)
        u = o._shift_down(m)
        q = a * u._unit_inverse() if any(a.c) else R.zero
        return EisensteinElem(R, q.c, new_prec)

    def _shift_down(self, m: int) -> "EisensteinElem":
        """Divide by pi^m assuming divisibility (no precision bookkeeping)."""
        R = self.ring
        e, p = R.e, R.p
        c = list(self.c)
        for _ in range(m):
            c0 = c[0]
            if c0 % p:
                raise NotDivisible("not divisible by pi")
            c = c[1:] + [c0 // p]
        return EisensteinElem(R, c, R.N)

    def __truediv__(self, o):
        return self.exact_div(o)

    def __eq__(self, o):
        o = self._co(o)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"EisensteinElem({self})"

    def __str__(self):
        R = self.ring
        parts = []
        for j, cj in enumerate(self.c):
            if not cj:
                continue
            k = -(-(self.prec - j) // R.e)
            mod = R.p ** k
            if cj > mod // 2:
                cj -= mod
            mono = "" if j == 0 else ("pi" if j == 1 else f"pi^{j}")
            if not mono:
                parts.append(str(cj))
            elif cj == 1:
                parts.append(mono)
            elif cj == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{cj}*{mono}")
        s = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        if self.prec < R.N:
            s += f" + O(pi^{self.prec})"
        return s


# ---------------------------------------------------------------------------
# sparse multivariate polynomials


def _grlex(e):
    return (sum(e), e)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


class PolyRing:
    """Polynomial ring over a scalar ring, optionally modulo monomial rewrite rules.

    ``rules`` is a sequence of ``(lead, replacement)`` where ``lead`` is an
    exponent tuple and ``replacement`` a ``{exponent: coefficient}`` mapping
    (empty for a rule that kills the monomial).  A rule of the exact shape
    ``C * L^(p-1) -> p`` is recognised and enables exact division through
    the embedding into Laurent polynomials in ``L``.
    """

    def __init__(self, variables: Sequence[str], coeffs=ZZ, rules: Iterable = (), p: int | None = None,
                 check_confluence: bool = True):
        self.vars = tuple(variables)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable names")
        self.index = {v: i for i, v in enumerate(self.vars)}
        self.coeffs = coeffs
        self.p = p if p is not None else getattr(coeffs, "p", None)
        self.nvars = len(self.vars)
        self._zero_exp = (0,) * self.nvars
        self.rules = []
        self._kill = []  # (var index, exponent) for single-variable kill rules
        for lead, repl in rules:
            lead = tuple(lead)
            repl = {tuple(k): coeffs.coerce(v) for k, v in dict(repl).items()}
            if len(lead) != self.nvars:
                raise ValueError("rule exponent has wrong length")
            self.rules.append((lead, repl))
            nz = [i for i, x in enumerate(lead) if x]
            if not repl and len(nz) == 1:
                self._kill.append((nz[0], lead[nz[0]]))
        self._general_rules = [r for r in self.rules if not (not r[1] and sum(1 for x in r[0] if x) == 1)]
        self.o_rule = self._detect_o_rule()
        self.zero = MultiPoly(self, {})
        self.one = self.const(1)
        if check_confluence and len(self.rules) > 1:
            self.check_local_confluence()

    # -- construction helpers
    @classmethod
    def from_rule_strings(cls, variables, rules: Sequence[str], coeffs=ZZ, p=None):
        base = PolyRing(variables, coeffs, p=p)
        parsed = []
        for text in rules:
            lhs, rhs = text.split("->")
            l = base.parse(lhs)
            r = base.parse(rhs)
            if len(l.terms) != 1 or next(iter(l.terms.values())) != 1:
                raise ValueError(f"rule left side must be a monic monomial: {text!r}")
            parsed.append((next(iter(l.terms)), dict(r.terms)))
        ring = PolyRing(variables, coeffs, parsed, p=p)
        ring._rule_strings = list(rules)
        return ring

    @classmethod
    def O(cls, p: int, extra: Sequence[str] = (), c: str = "C", lam: str = "L", coeffs=ZZ):
        """Z[C, L, extra...] / (p - C L^(p-1)), with C*L^(p-1) rewritten to p."""
        variables = (c, lam) + tuple(extra)
        lead = [0] * len(variables)
        lead[0] = 1
        lead[1] = p - 1
        ring = PolyRing(variables, coeffs, [(tuple(lead), {(0,) * len(variables): p})], p=p)
        ring._rule_strings = [f"{c}*{lam}^{p - 1} -> {p}"]
        return ring

    @classmethod
    def B(cls, n: int, nu: int, p: int, extra: Sequence[str] = (), coeffs=None):
        """Z_(p)[L1..Ln, M2..Mn] / (L_i^nu - M_{i+1} L_{i+1})."""
        coeffs = LocalRing(p) if coeffs is None else coeffs
        lam = [f"L{i}" for i in range(1, n + 1)]
        ms = [f"M{i}" for i in range(2, n + 1)]
        variables = tuple(lam + ms + list(extra))
        idx = {v: i for i, v in enumerate(variables)}
        rules, strings = [], []
        for i in range(1, n):
            lead = [0] * len(variables)
            lead[idx[f"L{i}"]] = nu
            rep = [0] * len(variables)
            rep[idx[f"M{i + 1}"]] = 1
            rep[idx[f"L{i + 1}"]] = 1
            rules.append((tuple(lead), {tuple(rep): 1}))
            strings.append(f"L{i}^{nu} -> M{i + 1}*L{i + 1}")
        ring = PolyRing(variables, coeffs, rules, p=p)
        ring._rule_strings = strings
        return ring

    @classmethod
    def nilpotent(cls, variables: Sequence[str], exponents: Mapping[str, int], coeffs=None, p=None):
        """Polynomial ring modulo var^k = 0 for each (var, k) in ``exponents``."""
        coeffs = (LocalRing(p) if p else QQ) if coeffs is None else coeffs
        variables = tuple(variables)
        rules, strings = [], []
        for v, k in exponents.items():
            lead = [0] * len(variables)
            lead[variables.index(v)] = k
            rules.append((tuple(lead), {}))
            strings.append(f"{v}^{k} -> 0")
        ring = PolyRing(variables, coeffs, rules, p=p, check_confluence=False)
        ring._rule_strings = strings
        return ring

    def with_vars(self, extra: Sequence[str]) -> "PolyRing":
        """Same coefficients and rules, extra variables appended."""
        extra = tuple(v for v in extra if v not in self.index)
        k = len(extra)
        rules = [(lead + (0,) * k, {e + (0,) * k: c for e, c in repl.items()}) for lead, repl in self.rules]
        ring = PolyRing(self.vars + extra, self.coeffs, rules, p=self.p, check_confluence=False)
        if hasattr(self, "_rule_strings"):
            ring._rule_strings = list(self._rule_strings)
        return ring

    def __repr__(self):
        rs = getattr(self, "_rule_strings", None)
        tail = f" / ({', '.join(rs)})" if rs else ""
        return f"{self.coeffs!r}[{', '.join(self.vars)}]{tail}"

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and self.vars == other.vars and self.coeffs == other.coeffs
                and self.rules == other.rules)

    def __hash__(self):
        return hash((self.vars, repr(self.coeffs)))

    # -- elements
    def const(self, c) -> "MultiPoly":
        c = self.coeffs.coerce(c)
        if self.coeffs.is_exact_zero(c):
            return MultiPoly(self, {})
        return MultiPoly(self, {self._zero_exp: c})

    def var(self, name: str) -> "MultiPoly":
        if name not in self.index:
            raise KeyError(f"unknown variable {name!r}")
        e = [0] * self.nvars
        e[self.index[name]] = 1
        return MultiPoly(self, self.normalize({tuple(e): self.coeffs.one}))

    def gens(self):
        return [self.var(v) for v in self.vars]

    def monomial(self, exps: Mapping[str, int], c=1) -> "MultiPoly":
        e = [0] * self.nvars
        for v, k in exps.items():
            e[self.index[v]] += k
        return MultiPoly(self, self.normalize({tuple(e): self.coeffs.coerce(c)}))

    def coerce(self, x) -> "MultiPoly":
        if isinstance(x, MultiPoly):
            if x.ring is self:
                return x
            if x.ring.vars == self.vars and x.ring.coeffs == self.coeffs:
                return MultiPoly(self, self.normalize(dict(x.terms)))
            if x.ring is self.coeffs:
                return self.const(x)
            k = len(x.ring.vars)
            if x.ring.vars == self.vars[:k] and x.ring.coeffs == self.coeffs:
                pad = (0,) * (self.nvars - k)
                return MultiPoly(self, self.normalize({e + pad: c for e, c in x.terms.items()}))
            raise ValueError(f"cannot coerce element of {x.ring!r} into {self!r}")
        return self.const(x)

    def from_terms(self, terms: Mapping) -> "MultiPoly":
        t = {}
        for e, c in terms.items():
            c = self.coeffs.coerce(c)
            if not self.coeffs.is_exact_zero(c):
                t[tuple(e)] = c
        return MultiPoly(self, self.normalize(t))

    # -- normal forms
    def normalize(self, terms: dict) -> dict:
        """Rewrite to normal form and drop zero coefficients (returns a new dict)."""
        cz = self.coeffs.is_exact_zero
        if not self.rules:
            return {e: c for e, c in terms.items() if not cz(c)}
        kill = self._kill
        general = self._general_rules
        out: dict = {}
        stack = list(terms.items())
        while stack:
            e, c = stack.pop()
            if cz(c):
                continue
            if any(e[i] >= k for i, k in kill):
                continue
            for lead, repl in general:
                if _divides(lead, e):
                    if repl:
                        rest = tuple(a - b for a, b in zip(e, lead))
                        for re_, rc in repl.items():
                            stack.append((tuple(a + b for a, b in zip(rest, re_)), c * rc))
                    break
            else:
                if e in out:
                    out[e] = out[e] + c
                else:
                    out[e] = c
        return {e: c for e, c in out.items() if not cz(c)}

    def check_local_confluence(self):
        """Resolve every critical pair of the rule set; raise if two normal forms differ."""
        for i, (l1, r1) in enumerate(self.rules):
            for l2, r2 in self.rules[i + 1:]:
                if not any(a and b for a, b in zip(l1, l2)):
                    continue
                lcm = tuple(max(a, b) for a, b in zip(l1, l2))
                s1 = {tuple(x + y - z for x, y, z in zip(k, lcm, l1)): c for k, c in r1.items()}
                s2 = {tuple(x + y - z for x, y, z in zip(k, lcm, l2)): c for k, c in r2.items()}
                if self.normalize(s1) != self.normalize(s2):
                    raise ValueError(f"rules are not locally confluent at {lcm}")
        return True

    def _detect_o_rule(self):
        if len(self.rules) != 1:
            return None
        lead, repl = self.rules[0]
        nz = [i for i, x in enumerate(lead) if x]
        if len(nz) not in (1, 2) or len(repl) != 1:
            return None
        (re_, rc), = repl.items()
        if any(re_) or not isinstance(rc, int) or rc < 2:
            return None
        p = rc
        if len(nz) == 2:
            a, b = nz
            if lead[a] == 1 and lead[b] == p - 1:
                return (a, b, p)
            if lead[b] == 1 and lead[a] == p - 1:
                return (b, a, p)
        return None

    # -- protocol
    def is_zero(self, x) -> bool:
        return self.coerce(x).is_zero()

    def is_exact_zero(self, x) -> bool:
        return self.coerce(x).is_zero()

    def exact_div(self, a, b) -> "MultiPoly":
        return self.coerce(a).exact_div(b)

    def fmt(self, x) -> str:
        return str(self.coerce(x))

    def parse(self, text: str) -> "MultiPoly":
        return self.coerce(_parse_expr(str(text), self))

    def describe(self):
        d = {"kind": "quotient" if self.rules else "poly", "vars": list(self.vars)}
        cd = self.coeffs.describe()
        d["coeffs"] = cd.get("coeffs", cd.get("kind"))
        if cd.get("kind") == "eisenstein":
            d["coeffs"] = cd
        if self.p is not None:
            d["p"] = self.p
        if self.rules:
            d["rules"] = list(getattr(self, "_rule_strings", [self._rule_str(r) for r in self.rules]))
        return d

    def _rule_str(self, rule):
        lead, repl = rule
        return f"{MultiPoly(self, {lead: 1})} -> {MultiPoly(self, dict(repl)) if repl else 0}"


class MultiPoly:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- coercion
    def _lift(self, o):
        # self is a coefficient of o's ring: promote self instead of o
        if isinstance(o, MultiPoly) and o.ring is not self.ring and o.ring.coeffs is self.ring:
            return o.ring.const(self)
        return None

    def _co(self, o):
        if isinstance(o, MultiPoly):
            if o.ring is self.ring:
                return o
            return self.ring.coerce(o)
        try:
            return self.ring.const(o)
        except TypeError:
            return None

    # -- queries
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def vanishes(self) -> bool:
        """True when every coefficient is zero in the coefficient ring (at precision)."""
        cz = self.ring.coeffs.is_zero
        return all(cz(c) for c in self.terms.values())

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.ring._zero_exp in self.terms)

    def constant_term(self):
        return self.terms.get(self.ring._zero_exp, self.ring.coeffs.zero)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var: str) -> int:
        i = self.ring.index[var]
        return max((e[i] for e in self.terms), default=-1)

    def coefficient(self, exps: Mapping[str, int]):
        e = [0] * self.ring.nvars
        for v, k in exps.items():
            e[self.ring.index[v]] = k
        return self.terms.get(tuple(e), self.ring.coeffs.zero)

    def variables(self) -> set:
        used = set()
        for e in self.terms:
            used.update(i for i, x in enumerate(e) if x)
        return {self.ring.vars[i] for i in used}

    def __len__(self):
        return len(self.terms)

    # -- arithmetic
    def __add__(self, o):
        up = self._lift(o)
        if up is not None:
            return up + o
        o = self._co(o)
        if o is None:
            return NotImplemented
        t = dict(self.terms)
        cz = self.ring.coeffs.is_exact_zero
        for e, c in o.terms.items():
            if e in t:
                s = t[e] + c
                if cz(s):
                    del t[e]
                else:
                    t[e] = s
            else:
                t[e] = c
        return MultiPoly(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, o):
        up = self._lift(o)
        if up is not None:
            return up - o
        o = self._co(o)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        up = self._lift(o)
        if up is not None:
            return o - up
        o = self._co(o)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, o):
        up = self._lift(o)
        if up is not None:
            return up * o
        o = self._co(o)
        if o is None:
            return NotImplemented
        if not self.terms or not o.terms:
            return self.ring.zero
        a, b = self.terms, o.terms
        if len(a) < len(b):
            a, b = b, a
        ring = self.ring
        kill = ring._kill
        res: dict = {}
        add = operator.add
        if len(b) == 1:
            (eb, cb), = b.items()
            for ea, ca in a.items():
                e = tuple(map(add, ea, eb))
                res[e] = ca * cb
        else:
            for eb, cb in b.items():
                for ea, ca in a.items():
                    e = tuple(map(add, ea, eb))
                    if kill and any(e[i] >= k for i, k in kill):
                        continue
                    if e in res:
                        res[e] = res[e] + ca * cb
                    else:
                        res[e] = ca * cb
        return MultiPoly(ring, ring.normalize(res))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "MultiPoly":
        c = self.ring.coeffs.coerce(c)
        return MultiPoly(self.ring, self.ring.normalize({e: x * c for e, x in self.terms.items()}))

    def __eq__(self, o):
        o = self._co(o)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    __hash__ = None

    # -- division
    def exact_div(self, o) -> "MultiPoly":
        """Exact quotient q with q*o == self; raises NotDivisible otherwise."""
        ring = self.ring
        o = self._co(o)
        if o is None or o.is_zero():
            raise NotDivisible("division by zero")
        if ring.o_rule is not None:
            return _o_divide(self, o)
        if o.is_constant():
            c = o.constant_term()
            return MultiPoly(ring, ring.normalize({e: ring.coeffs.exact_div(x, c) for e, x in self.terms.items()}))
        if len(o.terms) == 1:
            (eb, cb), = o.terms.items()
            out = {}
            for e, c in self.terms.items():
                if not _divides(eb, e):
                    raise NotDivisible(f"monomial division fails: {self} / {o}")
                out[tuple(x - y for x, y in zip(e, eb))] = ring.coeffs.exact_div(c, cb)
            q = MultiPoly(ring, ring.normalize(out))
            if ring.rules and not (q * o - self).is_zero():
                raise NotDivisible("termwise quotient does not multiply back")
            return q
        if ring.rules:
            raise NotDivisible("general division modulo rewrite rules is not supported")
        q = _divide_terms(self.terms, o.terms, ring.coeffs)
        return MultiPoly(ring, q)

    def divides_by(self, o) -> bool:
        try:
            self.exact_div(o)
            return True
        except (NotDivisible, NotIntegral):
            return False

    # -- evaluation and substitution
    def evaluate(self, values, target=None):
        """Substitute ``values`` (sequence by index or mapping by name) and sum in ``target``.

        ``target`` is the ring of the values; coefficients are coerced into it.
        Monomials involving a variable whose value is an exact zero are skipped.
        """
        ring = self.ring
        if isinstance(values, Mapping):
            vals = [values.get(v) for v in ring.vars]
        else:
            vals = list(values)
            vals += [None] * (ring.nvars - len(vals))
        if target is None:
            target = _ring_of(next((v for v in vals if v is not None), 0))
        zero_idx = set()
        for i, v in enumerate(vals):
            if v is None:
                continue
            if _is_exact_zero_value(v, target):
                zero_idx.add(i)
        cache: dict = {}

        def pw(i, k):
            key = (i, k)
            r = cache.get(key)
            if r is None:
                if k == 1:
                    r = vals[i]
                else:
                    h = k // 2
                    r = pw(i, h) * pw(i, k - h)
                cache[key] = r
            return r

        acc = target.zero
        for e, c in self.terms.items():
            skip = False
            term = None
            for i, k in enumerate(e):
                if k:
                    if i in zero_idx:
                        skip = True
                        break
                    if vals[i] is None:
                        raise KeyError(f"no value for variable {ring.vars[i]}")
                    f = pw(i, k)
                    term = f if term is None else term * f
            if skip:
                continue
            cc = target.coerce(c) if not isinstance(target, _ScalarRing) else c
            term = cc if term is None else term * cc
            acc = acc + term
        return acc

    def subs(self, mapping: Mapping[str, object]) -> "MultiPoly":
        """Substitute some variables by elements of this ring (or scalars)."""
        ring = self.ring
        vals = []
        for v in ring.vars:
            if v in mapping:
                vals.append(ring.coerce(mapping[v]))
            else:
                vals.append(ring.var(v))
        return self.evaluate(vals, ring)

    def map_coeffs(self, f, ring: "PolyRing | None" = None) -> "MultiPoly":
        ring = ring or self.ring
        return ring.from_terms({e: f(c) for e, c in self.terms.items()})

    def to_ring(self, ring: PolyRing) -> "MultiPoly":
        """Re-embed into a ring whose variables include all of ours (by name)."""
        pos = [ring.index[v] for v in self.ring.vars]
        out = {}
        for e, c in self.terms.items():
            ne = [0] * ring.nvars
            for i, k in enumerate(e):
                if k:
                    ne[pos[i]] += k
            ne = tuple(ne)
            out[ne] = out[ne] + c if ne in out else c
        return ring.from_terms(out)

    def coefficients_in(self, var: str) -> dict:
        """Split as sum_k coeff_k * var^k; returns {k: MultiPoly}."""
        i = self.ring.index[var]
        parts: dict = {}
        for e, c in self.terms.items():
            k = e[i]
            ne = e[:i] + (0,) + e[i + 1:]
            parts.setdefault(k, {})[ne] = c
        return {k: MultiPoly(self.ring, t) for k, t in parts.items()}

    # -- display
    def __str__(self):
        if not self.terms:
            return "0"
        ring = self.ring
        parts = []
        for e in sorted(self.terms, key=_grlex, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                (v if k == 1 else f"{v}^{k}") for v, k in zip(ring.vars, e) if k)
            cs = ring.coeffs.fmt(c)
            needs_paren = any(ch in cs.lstrip("-") for ch in "+- ") and not cs.lstrip("-").isdigit()
            if needs_paren and mono:
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"MultiPoly({self})"


def _is_exact_zero_value(v, target) -> bool:
    if isinstance(v, (int, Fraction)):
        return v == 0
    if isinstance(v, EisensteinElem):
        return v.prec >= v.ring.N and not any(v.c)
    if isinstance(v, MultiPoly):
        return not v.terms
    return False


def _ring_of(x):
    if isinstance(x, MultiPoly):
        return x.ring
    if isinstance(x, EisensteinElem):
        return x.ring
    if isinstance(x, Fraction) and x.denominator != 1:
        return QQ
    return ZZ


def _divide_terms(a: dict, b: dict, coeffs) -> dict:
    """Multivariate division by a single divisor under graded-lex order."""
    lb = max(b, key=_grlex)
    cb = b[lb]
    r = dict(a)
    q: dict = {}
    cz = coeffs.is_exact_zero
    while r:
        lr = max(r, key=_grlex)
        if not _divides(lb, lr):
            raise NotDivisible("remainder is nonzero")
        coef = coeffs.exact_div(r[lr], cb)
        mono = tuple(x - y for x, y in zip(lr, lb))
        q[mono] = coef
        for e, c in b.items():
            ne = tuple(x + y for x, y in zip(mono, e))
            v = r.get(ne, 0) - coef * c
            if cz(v):
                r.pop(ne, None)
            else:
                r[ne] = v
    return q


# -- division in Z[C, L, ...]/(p - C L^(p-1)) through the Laurent embedding C -> p L^(1-p)


def _to_laurent(x: MultiPoly):
    ci, li, p = x.ring.o_rule
    out: dict = {}
    for e, c in x.terms.items():
        a = e[ci]
        ne = list(e)
        ne[ci] = 0
        ne[li] = e[li] - a * (p - 1)
        ne = tuple(ne)
        v = Fraction(c) * p ** a
        out[ne] = out.get(ne, 0) + v
    return {e: c for e, c in out.items() if c != 0}


def _from_laurent(ring: PolyRing, terms: dict) -> MultiPoly:
    ci, li, p = ring.o_rule
    out = {}
    for e, c in terms.items():
        m = e[li]
        ne = list(e)
        if m >= 0:
            cc = c
        else:
            a = (-m + p - 2) // (p - 1)
            b = m + a * (p - 1)
            ne[ci] = a
            ne[li] = b
            cc = Fraction(c) / p ** a
        try:
            cc = ring.coeffs.coerce(_canon(Fraction(cc)))
        except NotIntegral as exc:
            raise NotDivisible(f"quotient leaves the ring: {exc}") from None
        out[tuple(ne)] = cc
    return MultiPoly(ring, ring.normalize(out))


def _o_divide(a: MultiPoly, b: MultiPoly) -> MultiPoly:
    ring = a.ring
    ci, li, p = ring.o_rule
    la, lb = _to_laurent(a), _to_laurent(b)
    if len(lb) == 1:
        (eb, cb), = lb.items()
        q = {}
        for e, c in la.items():
            ne = tuple(x - y for x, y in zip(e, eb))
            if any(k < 0 for i, k in enumerate(ne) if i != li):
                raise NotDivisible(f"{a} / {b}: monomial division fails")
            q[ne] = Fraction(c) / cb
        return _from_laurent(ring, q)
    # general divisor: clear negative L-exponents and divide over QQ
    sa = -min((e[li] for e in la), default=0)
    sb = -min(e[li] for e in lb)

    def shift(t, s):
        return {e[:li] + (e[li] + s,) + e[li + 1:]: c for e, c in t.items()}

    q = _divide_terms(shift(la, max(sa, 0) + max(sb, 0)), shift(lb, max(sb, 0)), QQ)
    q = shift(q, -max(sa, 0))
    return _from_laurent(ring, q)


# ---------------------------------------------------------------------------
# expression parsing (used for configs and rule strings)


def _parse_expr(text: str, ring):
    src = text.strip().replace("^", "**").replace("π", "pi").replace("Λ", "L")
    try:
        node = ast.parse(src, mode="eval").body
    except SyntaxError as exc:
        raise ValueError(f"cannot parse ring element {text!r}") from exc

    def ev(n):
        if isinstance(n, ast.Constant) and isinstance(n.value, int):
            return ring.coerce(n.value)
        if isinstance(n, ast.Name):
            return ring.var(n.id)
        if isinstance(n, ast.UnaryOp) and isinstance(n.op, (ast.USub, ast.UAdd)):
            v = ev(n.operand)
            return -v if isinstance(n.op, ast.USub) else v
        if isinstance(n, ast.BinOp):
            if isinstance(n.op, ast.Pow):
                if not (isinstance(n.right, ast.Constant) and isinstance(n.right.value, int)):
                    raise ValueError("exponents must be integer literals")
                return ev(n.left) ** n.right.value
            l, r = ev(n.left), ev(n.right)
            if isinstance(n.op, ast.Add):
                return l + r
            if isinstance(n.op, ast.Sub):
                return l - r
            if isinstance(n.op, ast.Mult):
                return l * r
            if isinstance(n.op, ast.Div):
                if isinstance(l, int) and isinstance(r, int) and not isinstance(ring, PolyRing):
                    return ring.coerce(Fraction(l, r))
                if isinstance(ring, PolyRing) and r.is_constant() and l.is_constant():
                    return ring.const(Fraction(l.constant_term()) / Fraction(r.constant_term()))
                return ring.exact_div(l, r)
        raise ValueError(f"unsupported syntax in {text!r}")

    return ev(node)


# ---------------------------------------------------------------------------
# module-level operations


def ring_exact_div(a, b):
    """Exact quotient in whatever ring ``a`` lives in."""
    if isinstance(a, (MultiPoly, EisensteinElem)):
        return a.exact_div(b)
    if isinstance(a, PLocalRational):
        return a.exact_div(b)
    if isinstance(b, (MultiPoly, EisensteinElem)):
        return _ring_of(b).coerce(a).exact_div(b)
    if isinstance(a, Fraction) or isinstance(b, Fraction):
        return QQ.exact_div(a, b)
    return ZZ.exact_div(a, b)


def ring_valuation(a):
    """pi-adic valuation of an Eisenstein element (AT_LEAST_PRECISION for zero)."""
    if isinstance(a, EisensteinElem):
        return a.valuation()
    if isinstance(a, PLocalRational):
        return a.valuation()
    raise TypeError("valuation is defined for Eisenstein and p-local elements")


def ring_from_description(d: Mapping):
    """Build a ring from its JSON description."""
    kind = d.get("kind", "poly")
    if kind == "eisenstein":
        return EisensteinRing(int(d["p"]), int(d.get("e", 1)), int(d.get("K", 12)))
    coeffs = d.get("coeffs", "ZZ")
    p = d.get("p")
    if isinstance(coeffs, Mapping):
        coeffs = ring_from_description(coeffs)
    elif coeffs == "ZZ":
        coeffs = ZZ
    elif coeffs == "QQ":
        coeffs = QQ
    elif coeffs in ("ZZp", "ZZ_(p)"):
        coeffs = LocalRing(int(p))
    else:
        raise ValueError(f"unknown coefficient domain {coeffs!r}")
    variables = list(d.get("vars", []))
    rules = list(d.get("rules", []))
    if not variables and not rules:
        return coeffs
    if kind == "quotient" or rules:
        return PolyRing.from_rule_strings(variables, rules, coeffs, p=p)
    return PolyRing(variables, coeffs, p=p)
