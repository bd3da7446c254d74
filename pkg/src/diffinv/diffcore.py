"""Exact differential polynomials and differential rational functions.

Symbols are ``Sym`` named tuples ``(kind, index, order, alpha)``; tuple
comparison gives the total symbol order (kind, then index, then graded-lex
on the multi-index).  A ``Poly`` is a sparse map from monomials (sorted
tuples of ``(Sym, exponent)``) to exact rational coefficients.  A
``DiffRational`` keeps its denominator as a product of primitive ``Poly``
factors, which keeps repeated quotient-rule differentiation from squaring
denominators.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Callable, Iterable, Mapping, NamedTuple, Optional, Union

Number = Union[int, Fraction]

# symbol kinds, in symbol-order rank
X, S, Z, U, P = range(5)
_KIND_PREFIX = {X: "x", S: "s"}


class DiffAlgebraError(Exception):
    pass


class ZeroDenominator(DiffAlgebraError, ZeroDivisionError):
    pass


class UnluckyEvaluation(DiffAlgebraError):
    pass


class Sym(NamedTuple):
    kind: int
    index: tuple
    order: int
    alpha: tuple

    @property
    def differentiable(self) -> bool:
        return self.kind == X or self.kind == S

    def shifted(self, i: int) -> "Sym":
        a = list(self.alpha)
        a[i] += 1
        return Sym(self.kind, self.index, self.order + 1, tuple(a))

    def base(self) -> "Sym":
        return Sym(self.kind, self.index, 0, (0,) * len(self.alpha))

    def __str__(self) -> str:
        k = self.kind
        if k == P:
            return self.index[0]
        if k == Z:
            return "z%d_%d" % self.index
        if k == U:
            return "u%d_%d" % self.index
        name = _KIND_PREFIX[k] + str(self.index[0])
        if self.order == 0:
            return name
        return "D[%s](%s)" % (",".join(map(str, self.alpha)), name)


def multi_index(entries: Iterable[int], m: Optional[int] = None) -> tuple:
    alpha = tuple(int(a) for a in entries)
    if any(a < 0 for a in alpha):
        raise ValueError("multi-index entries must be nonnegative: %r" % (alpha,))
    if m is not None and len(alpha) != m:
        raise ValueError("multi-index %r has length %d, expected %d" % (alpha, len(alpha), m))
    return alpha


def unit_index(i: int, m: int) -> tuple:
    """The multi-index e_i (1-based i)."""
    return tuple(1 if k == i - 1 else 0 for k in range(m))


def x_sym(j: int, alpha: tuple) -> Sym:
    return Sym(X, (j,), sum(alpha), tuple(alpha))


def s_sym(j: int, alpha: tuple) -> Sym:
    return Sym(S, (j,), sum(alpha), tuple(alpha))


def z_sym(i: int, j: int) -> Sym:
    return Sym(Z, (i, j), 0, ())


def u_sym(j: int, k: int) -> Sym:
    return Sym(U, (j, k), 0, ())


def param_sym(name: str) -> Sym:
    return Sym(P, (name,), 0, ())


# --------------------------------------------------------------------------
# monomials


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for s, e in b:
        d[s] = d.get(s, 0) + e
    return tuple(sorted(d.items()))


def _mono_div(a: tuple, b: tuple) -> Optional[tuple]:
    """a / b if b divides a, else None."""
    if not b:
        return a
    d = dict(a)
    for s, e in b:
        r = d.get(s, 0) - e
        if r < 0:
            return None
        if r:
            d[s] = r
        else:
            del d[s]
    return tuple(sorted(d.items()))


def _mono_deg(a: tuple) -> int:
    return sum(e for _, e in a)


def _grlex_cmp(a: tuple, b: tuple) -> int:
    # graded lex; the smaller symbol is the more significant variable
    da, db = _mono_deg(a), _mono_deg(b)
    if da != db:
        return -1 if da < db else 1
    for (sa, ea), (sb, eb) in zip(a, b):
        if sa != sb:
            return 1 if sa < sb else -1
        if ea != eb:
            return -1 if ea < eb else 1
    return 0


grlex_key = cmp_to_key(_grlex_cmp)


def _norm(c: Number) -> Number:
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _qdiv(a: Number, b: Number) -> Number:
    if type(a) is int and type(b) is int:
        if a % b == 0:
            return a // b
        return Fraction(a, b)
    return _norm(Fraction(a) / b)


def _fmt_number(c: Number) -> str:
    c = _norm(c)
    if type(c) is int:
        return str(c)
    return "%d/%d" % (c.numerator, c.denominator)


# --------------------------------------------------------------------------
# polynomials


class Poly:
    """Sparse multivariate polynomial with exact rational coefficients.

    Immutable by convention; ``terms`` must not be mutated after construction.
    Zero coefficients are never stored, so equal polynomials have equal
    ``terms`` dicts.
    """

    __slots__ = ("terms", "_hash", "_skey", "_prim")

    def __init__(self, terms: Optional[dict] = None):
        self.terms = terms if terms is not None else {}
        self._hash = None
        self._skey = None
        self._prim = False

    @classmethod
    def const(cls, c: Number) -> "Poly":
        c = _norm(c)
        return cls({(): c}) if c else cls()

    @classmethod
    def symbol(cls, s: Sym) -> "Poly":
        return cls({((s, 1),): 1})

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_const(self) -> bool:
        t = self.terms
        return not t or (len(t) == 1 and () in t)

    def const_value(self) -> Number:
        return self.terms.get((), 0)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_const() and self.const_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def sort_key(self) -> tuple:
        if self._skey is None:
            self._skey = (len(self.terms), tuple(sorted(self.terms.items())))
        return self._skey

    def symbols(self) -> set:
        out = set()
        for mono in self.terms:
            for s, _ in mono:
                out.add(s)
        return out

    def degree(self) -> int:
        return max((_mono_deg(m) for m in self.terms), default=0)

    def degree_in(self, s: Sym) -> int:
        best = 0
        for mono in self.terms:
            for t, e in mono:
                if t == s and e > best:
                    best = e
        return best

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        if len(other.terms) > len(self.terms):
            self, other = other, self
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.const(other)
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, c: Number) -> "Poly":
        c = _norm(c)
        if not c:
            return Poly()
        if c == 1:
            return self
        return Poly({m: _norm(v * c) for m, v in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return Poly()
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (mb, cb), = b.items()
            if not mb:
                return Poly(a).scale(cb)
            out = {}
            for ma, ca in a.items():
                out[_mono_mul(ma, mb)] = ca * cb
            return Poly(out)
        out = {}
        get = out.get
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = _mono_mul(ma, mb)
                v = get(m, 0) + ca * cb
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def mono_divide(self, mono: tuple) -> "Poly":
        out = {}
        for m, c in self.terms.items():
            q = _mono_div(m, mono)
            if q is None:
                raise ValueError("monomial does not divide polynomial")
            out[q] = c
        return Poly(out)

    # -- structure ----------------------------------------------------------

    def leading_monomial(self) -> tuple:
        return max(self.terms, key=grlex_key)

    def leading_coeff(self) -> Number:
        return self.terms[self.leading_monomial()]

    def content(self) -> Fraction:
        """Positive rational c with self/c an integer polynomial of content 1."""
        g = 0
        lden = 1
        for c in self.terms.values():
            if type(c) is int:
                g = gcd(g, c)
            else:
                g = gcd(g, c.numerator)
                lden = lden * c.denominator // gcd(lden, c.denominator)
        if not g:
            return Fraction(0)
        return Fraction(g, lden)

    def primitive(self) -> tuple:
        """(c, p) with self = c*p, p integer-primitive with positive leading coefficient."""
        c = self.content()
        if self.leading_coeff() < 0:
            c = -c
        if c == 1:
            return 1, self
        return _norm(c), Poly({m: _norm(v / c) for m, v in self.terms.items()})

    def monomial_content(self) -> tuple:
        """Largest monomial dividing every term."""
        it = iter(self.terms)
        first = next(it, None)
        if first is None:
            return ()
        d = dict(first)
        for mono in it:
            md = dict(mono)
            for s in list(d):
                e = md.get(s, 0)
                if e < d[s]:
                    if e:
                        d[s] = e
                    else:
                        del d[s]
            if not d:
                return ()
        return tuple(sorted(d.items()))

    def divexact(self, q: "Poly") -> Optional["Poly"]:
        """Exact quotient self/q, or None when q does not divide self."""
        if not q.terms:
            raise ZeroDenominator("division by the zero polynomial")
        if not self.terms:
            return Poly()
        if q.is_const():
            return self.scale(Fraction(1) / q.const_value())
        if len(q.terms) == 1:
            (mq, cq), = q.terms.items()
            out = {}
            for m, c in self.terms.items():
                t = _mono_div(m, mq)
                if t is None:
                    return None
                out[t] = _qdiv(c, cq)
            return Poly(out)
        for s in q.symbols():
            if q.degree_in(s) > self.degree_in(s):
                return None
        syms = sorted(self.symbols() | q.symbols())
        rank = {s: i for i, s in enumerate(syms)}
        width = len(syms)

        def negkey(mono):
            v = [0] * (width + 1)
            for s, e in mono:
                v[rank[s] + 1] = -e
                v[0] -= e
            return tuple(v)

        lt = q.leading_monomial()
        lc = q.terms[lt]
        rest = [(m, c) for m, c in q.terms.items() if m != lt]
        rem = dict(self.terms)
        heap = [(negkey(m), m) for m in rem]
        heapq.heapify(heap)
        queued = set(rem)
        quot = {}
        while heap:
            _, m = heapq.heappop(heap)
            queued.discard(m)
            c = rem.pop(m, None)
            if c is None:
                continue
            t = _mono_div(m, lt)
            if t is None:
                return None
            f = _qdiv(c, lc)
            quot[t] = f
            for mq, cq in rest:
                mm = _mono_mul(t, mq)
                v = rem.get(mm, 0) - f * cq
                if v:
                    rem[mm] = v
                    if mm not in queued:
                        queued.add(mm)
                        heapq.heappush(heap, (negkey(mm), mm))
                else:
                    rem.pop(mm, None)
        return Poly({m: _norm(c) for m, c in quot.items()})

    # -- calculus -----------------------------------------------------------

    def apply_derivation(self, dsym: Callable[[Sym], Optional["Poly"]]) -> "Poly":
        """Extend a derivation given on symbols to this polynomial (Leibniz)."""
        cache = {}
        out = Poly()
        acc = {}
        for mono, c in self.terms.items():
            for idx, (s, e) in enumerate(mono):
                if s in cache:
                    ds = cache[s]
                else:
                    ds = cache[s] = dsym(s)
                if ds is None or not ds.terms:
                    continue
                if e == 1:
                    rest = mono[:idx] + mono[idx + 1:]
                else:
                    rest = mono[:idx] + ((s, e - 1),) + mono[idx + 1:]
                coef = c * e
                for dm, dc in ds.terms.items():
                    m = _mono_mul(rest, dm)
                    v = acc.get(m, 0) + coef * dc
                    if v:
                        acc[m] = v
                    else:
                        acc.pop(m, None)
        out.terms = acc
        return out

    def derive(self, i: int) -> "Poly":
        return self.apply_derivation(lambda s: _shift_poly(s, i))

    def partial(self, var: Sym) -> "Poly":
        one = Poly.const(1)
        return self.apply_derivation(lambda s: one if s == var else None)

    def subs(self, mapping: Mapping[Sym, "Poly"]) -> "Poly":
        """Simultaneous substitution of polynomials for symbols."""
        if not any(s in mapping for s in self.symbols()):
            return self
        powers = {}
        out = Poly()
        acc = {}
        for mono, c in self.terms.items():
            term = Poly({(): c})
            keep = []
            for s, e in mono:
                if s in mapping:
                    key = (s, e)
                    if key not in powers:
                        powers[key] = mapping[s] ** e
                    term = term * powers[key]
                else:
                    keep.append((s, e))
            if keep:
                term = term * Poly({tuple(keep): 1})
            for m, v in term.terms.items():
                w = acc.get(m, 0) + v
                if w:
                    acc[m] = w
                else:
                    acc.pop(m, None)
        out.terms = acc
        return out

    def evaluate(self, values: Mapping[Sym, Number]) -> Number:
        total = 0
        for mono, c in self.terms.items():
            v = c
            for s, e in mono:
                v = v * values[s] ** e
            total += v
        return _norm(total) if type(total) is Fraction else total

    # -- printing -----------------------------------------------------------

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (mono, c) in enumerate(self.sorted_terms()):
            neg = c < 0
            a = -c if neg else c
            factors = [str(s) if e == 1 else "%s^%d" % (s, e) for s, e in mono]
            if a != 1 or not factors:
                factors.insert(0, _fmt_number(a))
            body = "*".join(factors)
            if i == 0:
                parts.append("-" + body if neg else body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return "Poly(%s)" % self


_SHIFT_CACHE: dict = {}


def _shift_poly(s: Sym, i: int) -> Optional[Poly]:
    if not s.differentiable:
        return None
    key = (s, i)
    p = _SHIFT_CACHE.get(key)
    if p is None:
        if i < 0 or i >= len(s.alpha):
            raise ValueError("derivation index %d out of range for m=%d" % (i + 1, len(s.alpha)))
        p = _SHIFT_CACHE[key] = Poly.symbol(s.shifted(i))
    return p


# --------------------------------------------------------------------------
# rational functions


def _is_symbol_poly(p: Poly) -> bool:
    if len(p.terms) != 1:
        return False
    (mono, c), = p.terms.items()
    return c == 1 and len(mono) == 1 and mono[0][1] == 1


class DiffRational:
    """Quotient ``num / prod(f**e for f, e in den)`` of differential polynomials.

    Denominator factors are primitive integer polynomials with positive
    leading coefficient; single-monomial factors are split into symbol
    factors so that monomial content cancels against the numerator.  The
    overall constant lives in ``num``.  ``==`` is semantic equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Optional[dict] = None, _normalized: bool = False):
        if _normalized:
            self.num, self.den = num, den
            return
        self.num, self.den = _normalize(num, den or {})

    # -- constructors -------------------------------------------------------

    @classmethod
    def const(cls, c: Number) -> "DiffRational":
        return cls(Poly.const(c), {}, True)

    @classmethod
    def symbol(cls, s: Sym) -> "DiffRational":
        return cls(Poly.symbol(s), {}, True)

    @classmethod
    def from_poly(cls, p: Poly) -> "DiffRational":
        return cls(p, {}, True)

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num.terms

    def is_poly(self) -> bool:
        return not self.den

    def is_const(self) -> bool:
        return not self.den and self.num.is_const()

    def const_value(self) -> Number:
        if not self.is_const():
            raise ValueError("not a constant: %s" % self)
        return self.num.const_value()

    def symbols(self) -> set:
        out = self.num.symbols()
        for f in self.den:
            out |= f.symbols()
        return out

    def max_order(self) -> int:
        return max((s.order for s in self.symbols()), default=0)

    def denominator(self) -> Poly:
        """Expanded denominator polynomial."""
        out = Poly.const(1)
        for f, e in self.den.items():
            out = out * f ** e
        return out

    def structure(self) -> tuple:
        """Representation key; identical for representation-identical values."""
        return (
            tuple(sorted(self.num.terms.items())),
            tuple(sorted((f.sort_key(), e) for f, e in self.den.items())),
        )

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def coerce(v) -> "DiffRational":
        if isinstance(v, DiffRational):
            return v
        if isinstance(v, Poly):
            return DiffRational(v, {}, True)
        if isinstance(v, (int, Fraction)):
            return DiffRational.const(v)
        raise TypeError("cannot coerce %r to DiffRational" % (v,))

    def _combine(self, other: "DiffRational", sign: int) -> "DiffRational":
        if not other.num.terms:
            return self
        if not self.num.terms:
            return other if sign > 0 else -other
        if self.den == other.den:
            num = self.num + other.num if sign > 0 else self.num - other.num
            return DiffRational(num, dict(self.den))
        lcm = dict(self.den)
        for f, e in other.den.items():
            if lcm.get(f, 0) < e:
                lcm[f] = e
        a = self.num * _den_power(lcm, self.den)
        b = other.num * _den_power(lcm, other.den)
        return DiffRational(a + b if sign > 0 else a - b, lcm)

    def __add__(self, other) -> "DiffRational":
        return self._combine(DiffRational.coerce(other), 1)

    __radd__ = __add__

    def __sub__(self, other) -> "DiffRational":
        return self._combine(DiffRational.coerce(other), -1)

    def __rsub__(self, other) -> "DiffRational":
        return DiffRational.coerce(other)._combine(self, -1)

    def __neg__(self) -> "DiffRational":
        return DiffRational(-self.num, self.den, True)

    def __mul__(self, other) -> "DiffRational":
        other = DiffRational.coerce(other)
        if not self.num.terms or not other.num.terms:
            return ZERO
        if not other.den and other.num.is_const():
            return DiffRational(self.num.scale(other.num.const_value()), self.den, True)
        if not self.den and self.num.is_const():
            return DiffRational(other.num.scale(self.num.const_value()), other.den, True)
        n1, n2 = self.num, other.num
        den = dict(self.den)
        for f, e in other.den.items():
            den[f] = den.get(f, 0) + e
        # cross-cancel numerators against the other operand's multi-term factors
        n1, den = _cancel_into(n1, other.den, den)
        n2, den = _cancel_into(n2, self.den, den)
        return DiffRational(n1 * n2, den)

    __rmul__ = __mul__

    def inverse(self) -> "DiffRational":
        if not self.num.terms:
            raise ZeroDenominator("inverse of zero")
        num = _den_power(self.den, {})
        return DiffRational(num, {self.num: 1})

    def __truediv__(self, other) -> "DiffRational":
        other = DiffRational.coerce(other)
        if not other.num.terms:
            raise ZeroDenominator("division by zero")
        if not other.den and other.num.is_const():
            return DiffRational(self.num.scale(Fraction(1) / other.num.const_value()), self.den, True)
        return self * other.inverse()

    def __rtruediv__(self, other) -> "DiffRational":
        return DiffRational.coerce(other) / self

    def __pow__(self, k: int) -> "DiffRational":
        if k < 0:
            return self.inverse() ** (-k)
        if k == 0:
            return ONE
        return DiffRational(self.num ** k, {f: e * k for f, e in self.den.items()}, True)

    def __eq__(self, other) -> bool:
        try:
            other = DiffRational.coerce(other)
        except TypeError:
            return NotImplemented
        return equals(self, other)

    __hash__ = None

    # -- calculus -----------------------------------------------------------

    def apply_derivation(self, dsym: Callable[[Sym], Optional[Poly]]) -> "DiffRational":
        """Extend a derivation on symbols to this quotient (quotient rule on factors)."""
        dnum = self.num.apply_derivation(dsym)
        if not self.den:
            return DiffRational(dnum, {}, True)
        active = []
        for f, e in self.den.items():
            df = f.apply_derivation(dsym)
            if df.terms:
                active.append((f, e, df))
        if not active:
            return DiffRational(dnum, self.den)
        radical = Poly.const(1)
        for f, _, _ in active:
            radical = radical * f
        num = dnum * radical
        for idx, (f, e, df) in enumerate(active):
            others = Poly.const(1)
            for jdx, (g, _, _) in enumerate(active):
                if jdx != idx:
                    others = others * g
            num = num - (self.num * df * others).scale(e)
        den = dict(self.den)
        for f, e, _ in active:
            den[f] = e + 1
        return DiffRational(num, den)

    def derive(self, i: int) -> "DiffRational":
        """Formal derivative along the i-th derivation (0-based)."""
        return self.apply_derivation(lambda s: _shift_poly(s, i))

    def partial(self, var: Sym) -> "DiffRational":
        one = Poly.const(1)
        return self.apply_derivation(lambda s: one if s == var else None)

    def subs(self, mapping: Mapping[Sym, "DiffRational"]) -> "DiffRational":
        syms = self.symbols()
        used = {s: DiffRational.coerce(v) for s, v in mapping.items() if s in syms}
        if not used:
            return self
        if all(not v.den for v in used.values()):
            pmap = {s: v.num for s, v in used.items()}
            num = self.num.subs(pmap)
            den = {}
            for f, e in self.den.items():
                g = f.subs(pmap)
                if not g.terms:
                    raise ZeroDenominator("denominator factor %s vanishes under substitution" % f)
                den[g] = den.get(g, 0) + e
            return DiffRational(num, den)
        out = _poly_subs_rational(self.num, used)
        for f, e in self.den.items():
            g = _poly_subs_rational(f, used)
            if g.is_zero():
                raise ZeroDenominator("denominator factor %s vanishes under substitution" % f)
            out = out / g ** e
        return out

    def evaluate(self, values: Mapping[Sym, Number]) -> Number:
        d = 1
        for f, e in self.den.items():
            d = d * f.evaluate(values) ** e
        if d == 0:
            raise ZeroDenominator("denominator vanishes at the evaluation point")
        return _qdiv(self.num.evaluate(values), d)

    def cancel(self) -> "DiffRational":
        """Remove denominator factors that divide the numerator exactly."""
        if not self.den:
            return self
        num = self.num
        den = dict(self.den)
        changed = False
        for f in list(den):
            if _is_symbol_poly(f):
                continue
            while den[f]:
                q = num.divexact(f)
                if q is None:
                    break
                num = q
                den[f] -= 1
                changed = True
            if not den[f]:
                del den[f]
        return DiffRational(num, den) if changed else self

    # -- printing -----------------------------------------------------------

    def __str__(self) -> str:
        num = str(self.num)
        if not self.den:
            return num
        if len(self.num.terms) > 1:
            num = "(%s)" % num
        factors = []
        for f, e in sorted(self.den.items(), key=_den_print_key):
            s = str(f)
            if len(f.terms) > 1:
                s = "(%s)" % s
            elif e > 1 and not _is_symbol_poly(f):
                s = "(%s)" % s
            factors.append(s if e == 1 else "%s^%d" % (s, e))
        den = "*".join(factors)
        if len(factors) > 1:
            den = "(%s)" % den
        return "%s/%s" % (num, den)

    def __repr__(self) -> str:
        return "DiffRational(%s)" % self


def _den_print_key(item):
    f, e = item
    if _is_symbol_poly(f):
        (mono, _), = f.terms.items()
        return (0, mono[0][0], ())
    return (1, None, f.sort_key())


def _den_power(full: dict, part: dict) -> Poly:
    out = Poly.const(1)
    for f, e in full.items():
        k = e - part.get(f, 0)
        if k:
            out = out * f ** k
    return out


def _cancel_into(num: Poly, factors: dict, den: dict):
    for f in factors:
        if _is_symbol_poly(f) or len(f.terms) > len(num.terms):
            continue
        while den.get(f):
            q = num.divexact(f)
            if q is None:
                break
            num = q
            den[f] -= 1
            if not den[f]:
                del den[f]
    return num, den


def _poly_subs_rational(p: Poly, mapping: Mapping[Sym, DiffRational]) -> DiffRational:
    powers = {}
    # group terms by the substituted part to share denominators
    acc = ZERO
    for mono, c in p.terms.items():
        term = DiffRational.const(c)
        keep = []
        for s, e in mono:
            if s in mapping:
                key = (s, e)
                if key not in powers:
                    powers[key] = mapping[s] ** e
                term = term * powers[key]
            else:
                keep.append((s, e))
        if keep:
            term = term * DiffRational(Poly({tuple(keep): 1}), {}, True)
        acc = acc + term
    return acc


def _normalize(num: Poly, den: dict):
    if not num.terms:
        return Poly(), {}
    if not den:
        return num, {}
    scale = Fraction(1)
    out = {}
    for f, e in den.items():
        if e == 0:
            continue
        if e < 0:
            raise ValueError("negative denominator exponent")
        if not f.terms:
            raise ZeroDenominator("zero denominator factor")
        if f._prim:
            out[f] = out.get(f, 0) + e
            continue
        if len(f.terms) == 1:
            (mono, c), = f.terms.items()
            scale /= Fraction(c) ** e
            for s, k in mono:
                key = Poly.symbol(s)
                key._prim = True
                out[key] = out.get(key, 0) + k * e
            continue
        mc = f.monomial_content()
        if mc:
            f = f.mono_divide(mc)
            for s, k in mc:
                key = Poly.symbol(s)
                key._prim = True
                out[key] = out.get(key, 0) + k * e
        c, g = f.primitive()
        if c != 1:
            scale /= Fraction(c) ** e
        g._prim = True
        out[g] = out.get(g, 0) + e
    if scale != 1:
        num = num.scale(scale)
    # cancel monomial content against symbol factors
    symf = [f for f in out if _is_symbol_poly(f)]
    if symf:
        mc = dict(num.monomial_content())
        cut = []
        for f in symf:
            (mono, _), = f.terms.items()
            s = mono[0][0]
            k = min(mc.get(s, 0), out[f])
            if k:
                cut.append((s, k))
                out[f] -= k
                if not out[f]:
                    del out[f]
        if cut:
            num = num.mono_divide(tuple(sorted(cut)))
    return num, out


ZERO = DiffRational(Poly(), {}, True)
ONE = DiffRational(Poly.const(1), {}, True)


# --------------------------------------------------------------------------
# context and operations


RESERVED_PREFIXES = ("x", "s", "z", "u")


@dataclass(frozen=True)
class Context:
    """Ambient sizes and configuration for randomized procedures."""

    m: int
    n: int
    parameters: tuple = ()
    seed: int = 0
    eval_range: int = 10 ** 6
    retries: int = 8
    trials: int = 8
    closure_bound: int = 10 ** 4
    groups: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive")
        names = tuple(self.parameters)
        if len(set(names)) != len(names):
            raise ValueError("duplicate parameter names")
        for name in names:
            if not is_parameter_name(name):
                raise ValueError("invalid or reserved parameter name: %r" % name)
        object.__setattr__(self, "parameters", names)

    def alpha(self, entries: Iterable[int]) -> tuple:
        return multi_index(entries, self.m)

    def zero_alpha(self) -> tuple:
        return (0,) * self.m

    def x(self, j: int, alpha: Optional[Iterable[int]] = None) -> DiffRational:
        if not 1 <= j <= self.n:
            raise ValueError("x index %d out of range 1..%d" % (j, self.n))
        a = self.zero_alpha() if alpha is None else self.alpha(alpha)
        return DiffRational.symbol(x_sym(j, a))

    def s(self, j: int, alpha: Optional[Iterable[int]] = None) -> DiffRational:
        if j < 1:
            raise ValueError("potential index must be positive")
        a = self.zero_alpha() if alpha is None else self.alpha(alpha)
        return DiffRational.symbol(s_sym(j, a))

    def z(self, i: int, j: int) -> DiffRational:
        if not (1 <= i <= self.n + 1 and 1 <= j <= self.n):
            raise ValueError("tuple variable z%d_%d out of range" % (i, j))
        return DiffRational.symbol(z_sym(i, j))

    def u(self, j: int, k: int) -> DiffRational:
        return DiffRational.symbol(u_sym(j, k))

    def param(self, name: str) -> DiffRational:
        if not is_parameter_name(name):
            raise ValueError("invalid or reserved parameter name: %r" % name)
        return DiffRational.symbol(param_sym(name))

    def const(self, c: Number) -> DiffRational:
        return DiffRational.const(c)


def is_parameter_name(name: str) -> bool:
    if not name or not (name[0].isalpha() or name[0] == "_"):
        return False
    if not all(ch.isalnum() or ch == "_" for ch in name):
        return False
    if name == "D" or name[0] in RESERVED_PREFIXES:
        return False
    return True


def derive(f: DiffRational, i: int) -> DiffRational:
    """Derivative of ``f`` along the i-th derivation, 1-based."""
    if i < 1:
        raise ValueError("derivation index must be >= 1")
    return f.derive(i - 1).cancel()


def derive_multi(f: DiffRational, alpha: Iterable[int]) -> DiffRational:
    for i, a in enumerate(alpha):
        for _ in range(a):
            f = f.derive(i)
    return f.cancel()


def equals(f: DiffRational, g: DiffRational) -> bool:
    """Exact semantic equality: num(f)*den(g) - num(g)*den(f) == 0."""
    if f.den == g.den:
        return f.num == g.num
    lcm = dict(f.den)
    for q, e in g.den.items():
        if lcm.get(q, 0) < e:
            lcm[q] = e
    return f.num * _den_power(lcm, f.den) == g.num * _den_power(lcm, g.den)


def substitute(f: DiffRational, mapping: Mapping[Sym, DiffRational]) -> DiffRational:
    return f.subs(mapping).cancel()


def draw_point(symbols: Iterable[Sym], rng: random.Random, bound: int) -> dict:
    return {s: rng.randint(-bound, bound) for s in sorted(symbols)}


def eval_random(f: DiffRational, seed: int, bound: int = 10 ** 6, retries: int = 8) -> Number:
    """Evaluate at independent uniform integers in [-bound, bound]."""
    rng = random.Random(seed)
    syms = sorted(f.symbols())
    for _ in range(retries):
        point = {s: rng.randint(-bound, bound) for s in syms}
        try:
            return f.evaluate(point)
        except ZeroDenominator:
            continue
    raise UnluckyEvaluation("denominator vanished on %d random points" % retries)


def is_zero_probabilistic(f: DiffRational, trials: int, seed: int = 0, bound: int = 10 ** 6,
                          retries: int = 8) -> bool:
    """One-sided zero test: False is certain, True holds with high probability."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if f.is_zero():
        return True
    for t in range(trials):
        if eval_random(f, seed * 1_000_003 + t, bound, retries) != 0:
            return False
    return True


def agree_probabilistic(f: DiffRational, g: DiffRational, trials: int, seed: int = 0,
                        bound: int = 10 ** 6, retries: int = 8) -> bool:
    """Randomized test of f == g that never forms f - g."""
    syms = sorted(f.symbols() | g.symbols())
    for t in range(trials):
        rng = random.Random(seed * 1_000_003 + t)
        for _ in range(retries):
            point = {s: rng.randint(-bound, bound) for s in syms}
            try:
                a, b = f.evaluate(point), g.evaluate(point)
            except ZeroDenominator:
                continue
            break
        else:
            raise UnluckyEvaluation("denominator vanished on %d random points" % retries)
        if a != b:
            return False
    return True
