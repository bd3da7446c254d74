"""Affine and gauge actions on differential rational functions.

The affine action substitutes ``x -> h x + h0`` into every derivative
symbol; the gauge action replaces the derivations by ``g^{-1} d``.  Generic
gauges are Jacobians ``(d_i s_j)`` of fresh potentials ``s_j``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from . import linalg
from .diffcore import (
    ONE,
    P,
    S,
    X,
    ZERO,
    Context,
    DiffAlgebraError,
    DiffRational,
    Sym,
    derive,
    equals,
    param_sym,
    s_sym,
    unit_index,
    x_sym,
)


class NotGaugeCompatible(DiffAlgebraError):
    pass


class ZeroVector(DiffAlgebraError):
    pass


class GroupClosureExceeded(DiffAlgebraError):
    pass


def _as_matrix(rows) -> Tuple[Tuple[DiffRational, ...], ...]:
    return tuple(tuple(DiffRational.coerce(v) for v in row) for row in rows)


# --------------------------------------------------------------------------
# affine group elements


@dataclass(frozen=True, eq=False)
class AffineElement:
    """An element (h, h0) of GL(n, C) x| C^n with constant entries."""

    h: tuple
    h0: tuple

    def __post_init__(self):
        h = _as_matrix(self.h)
        h0 = tuple(DiffRational.coerce(v) for v in self.h0)
        n = len(h)
        if any(len(row) != n for row in h) or len(h0) != n:
            raise ValueError("affine element needs an n x n matrix and an n-vector")
        for e in itertools.chain(itertools.chain.from_iterable(h), h0):
            for s in e.symbols():
                if s.kind != P:
                    raise ValueError("affine entries must be constants, found %s" % (s,))
        if linalg.det(h).is_zero():
            raise ValueError("affine element has singular linear part")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "h0", h0)

    @property
    def n(self) -> int:
        return len(self.h)

    @classmethod
    def identity(cls, n: int) -> "AffineElement":
        return cls(linalg.identity(n), [ZERO] * n)

    @classmethod
    def linear(cls, h) -> "AffineElement":
        return cls(h, [ZERO] * len(h))

    @classmethod
    def translation(cls, h0) -> "AffineElement":
        return cls(linalg.identity(len(h0)), h0)

    def compose(self, other: "AffineElement") -> "AffineElement":
        """self after other: x -> h (h' x + h0') + h0."""
        hh = linalg.matmul(self.h, other.h)
        v = linalg.matvec(self.h, other.h0)
        return AffineElement(hh, [a + b for a, b in zip(v, self.h0)])

    def inverse(self) -> "AffineElement":
        hi = linalg.inverse(self.h)
        v = linalg.matvec(hi, self.h0)
        return AffineElement(hi, [-a for a in v])

    def key(self) -> tuple:
        return tuple(e.cancel().structure() for e in itertools.chain(itertools.chain.from_iterable(self.h), self.h0))

    def is_identity(self) -> bool:
        return self.key() == AffineElement.identity(self.n).key()

    def __str__(self) -> str:
        rows = "; ".join(", ".join(str(e) for e in row) for row in self.h)
        return "h=[%s] h0=[%s]" % (rows, ", ".join(str(e) for e in self.h0))


class GroupPresentation:
    """A subgroup H of the affine group, given by elements to check against."""

    name: str = "group"

    def elements(self) -> List[AffineElement]:
        raise NotImplementedError

    @property
    def n(self) -> int:
        return self.elements()[0].n


class FiniteGroup(GroupPresentation):
    """Explicit list of elements, closed under inverses, containing the identity."""

    def __init__(self, elements: Iterable[AffineElement], name: str = "finite"):
        self._elements = list(elements)
        self.name = name
        if not self._elements:
            raise ValueError("empty group")
        keys = {e.key() for e in self._elements}
        if not any(e.is_identity() for e in self._elements):
            raise ValueError("group list must contain the identity")
        for e in self._elements:
            if e.inverse().key() not in keys:
                raise ValueError("group list is not closed under inverses: %s" % e)

    def elements(self) -> List[AffineElement]:
        return list(self._elements)


class ParametrizedGroup(GroupPresentation):
    """One affine element whose entries are rational in free parameters."""

    def __init__(self, element: AffineElement, params: Sequence[str] = (), name: str = "parametrized"):
        self.element = element
        self.params = tuple(params)
        self.name = name

    def elements(self) -> List[AffineElement]:
        return [self.element]


def translations(n: int) -> ParametrizedGroup:
    names = ["t%d" % j for j in range(1, n + 1)]
    h0 = [DiffRational.symbol(param_sym(t)) for t in names]
    return ParametrizedGroup(AffineElement.translation(h0), names, "translations%d" % n)


def general_affine(n: int) -> ParametrizedGroup:
    """Generic element of GL(n) x| C^n with independent parameter entries."""
    hn = [["h%d_%d" % (j, k) for k in range(1, n + 1)] for j in range(1, n + 1)]
    cn = ["c%d" % j for j in range(1, n + 1)]
    h = [[DiffRational.symbol(param_sym(v)) for v in row] for row in hn]
    h0 = [DiffRational.symbol(param_sym(v)) for v in cn]
    return ParametrizedGroup(AffineElement(h, h0), [v for row in hn for v in row] + cn, "gl%d" % n)


def general_linear(n: int) -> ParametrizedGroup:
    hn = [["h%d_%d" % (j, k) for k in range(1, n + 1)] for j in range(1, n + 1)]
    h = [[DiffRational.symbol(param_sym(v)) for v in row] for row in hn]
    return ParametrizedGroup(AffineElement.linear(h), [v for row in hn for v in row], "linear%d" % n)


def sign_group(n: int) -> FiniteGroup:
    ident = AffineElement.identity(n)
    neg = AffineElement.linear([[-e for e in row] for row in ident.h])
    return FiniteGroup([ident, neg], "sign")


def permutation_group(n: int) -> FiniteGroup:
    elems = []
    for perm in itertools.permutations(range(n)):
        h = [[ONE if perm[j] == k else ZERO for k in range(n)] for j in range(n)]
        elems.append(AffineElement.linear(h))
    return FiniteGroup(elems, "perm%d" % n)


def trivial_group(n: int) -> FiniteGroup:
    return FiniteGroup([AffineElement.identity(n)], "trivial")


def group_closure(generators: Iterable[AffineElement], bound: int = 10 ** 4) -> List[AffineElement]:
    gens = list(generators)
    if not gens:
        raise ValueError("no generators")
    ident = AffineElement.identity(gens[0].n)
    seen = {ident.key(): ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = g.compose(a)
                k = b.key()
                if k not in seen:
                    seen[k] = b
                    nxt.append(b)
                    if len(seen) > bound:
                        raise GroupClosureExceeded("group closure exceeds %d elements" % bound)
        frontier = nxt
    return list(seen.values())


# --------------------------------------------------------------------------
# gauge matrices


class GaugeMatrix:
    """Invertible m x m matrix over differential rationals, with cached det/adjugate."""

    def __init__(self, entries):
        self.entries = [list(row) for row in _as_matrix(entries)]
        m = len(self.entries)
        if m == 0 or any(len(r) != m for r in self.entries):
            raise ValueError("gauge matrix must be square and nonempty")
        self.det = linalg.det(self.entries)
        if self.det.is_zero():
            raise ValueError("gauge matrix is singular")
        self.adjugate = linalg.adjugate(self.entries)
        self._inv = None

    @property
    def m(self) -> int:
        return len(self.entries)

    def inverse(self) -> List[List[DiffRational]]:
        if self._inv is None:
            self._inv = [[(e / self.det).cancel() for e in row] for row in self.adjugate]
        return self._inv

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __str__(self) -> str:
        return "[%s]" % "; ".join(", ".join(str(e) for e in row) for row in self.entries)


def is_gl_partial(g: GaugeMatrix) -> bool:
    """True iff d_i g_jk == d_j g_ik for all i, j, k."""
    return gl_partial_witness(g) is None


def gl_partial_witness(g: GaugeMatrix) -> Optional[tuple]:
    m = g.m
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            for k in range(1, m + 1):
                a = derive(g.entries[j - 1][k - 1], i)
                b = derive(g.entries[i - 1][k - 1], j)
                if not equals(a, b):
                    return (i, j, k, a - b)
    return None


def max_potential_index(exprs: Iterable[DiffRational]) -> int:
    top = 0
    for e in exprs:
        for s in e.symbols():
            if s.kind == S and s.index[0] > top:
                top = s.index[0]
    return top


def generic_gauge(ctx: Context, avoid: Iterable[DiffRational] = (), start: Optional[int] = None) -> GaugeMatrix:
    """T with t_ij = d_i s_j for m potentials not occurring in ``avoid``."""
    if start is None:
        start = max_potential_index(avoid) + 1
    m = ctx.m
    entries = [[DiffRational.symbol(s_sym(start + j, unit_index(i + 1, m))) for j in range(m)]
               for i in range(m)]
    return GaugeMatrix(entries)


class DeltaOperators:
    """The commuting system delta = g^{-1} d for a gauge g."""

    def __init__(self, g: GaugeMatrix):
        self.g = g
        self.m = g.m

    def apply(self, e: DiffRational, i: int) -> DiffRational:
        """delta_i(e), 1-based i."""
        acc = ZERO
        row = self.g.adjugate[i - 1]
        for k in range(self.m):
            if row[k].is_zero():
                continue
            d = e.derive(k)
            if d.is_zero():
                continue
            acc = acc + row[k] * d
        return (acc / self.g.det).cancel()

    def apply_multi(self, e: DiffRational, alpha: Sequence[int], peel: str = "first") -> DiffRational:
        steps = []
        for i, a in enumerate(alpha):
            steps.extend([i + 1] * a)
        if peel == "first":
            steps.reverse()
        # steps are applied innermost first
        for i in steps:
            e = self.apply(e, i)
        return e


def delta_substitute(f: DiffRational, g: GaugeMatrix, values: Optional[dict] = None,
                     peel: str = "first") -> DiffRational:
    """Replace each d^a x_j in f by delta^a(values[j]), delta = g^{-1} d.

    ``values`` maps j to the expression standing for x_j (default x_j).
    """
    ops = DeltaOperators(g)
    memo = {}

    def delta_power(j: int, alpha: tuple, base: DiffRational) -> DiffRational:
        key = (j, alpha)
        if key in memo:
            return memo[key]
        if not any(alpha):
            out = base
        else:
            idxs = [i for i, a in enumerate(alpha) if a]
            i = idxs[0] if peel == "first" else idxs[-1]
            lower = list(alpha)
            lower[i] -= 1
            out = ops.apply(delta_power(j, tuple(lower), base), i + 1)
        memo[key] = out
        return out

    mapping = {}
    for s in f.symbols():
        if s.kind != X:
            continue
        j = s.index[0]
        if values is not None and j in values:
            base = DiffRational.coerce(values[j])
        elif s.order == 0:
            continue
        else:
            base = DiffRational.symbol(s.base())
        mapping[s] = delta_power(j, s.alpha, base)
    return f.subs(mapping).cancel()


# --------------------------------------------------------------------------
# actions


def affine_act(f: DiffRational, a: AffineElement) -> DiffRational:
    """f<h x + h0>: each d^a x_j -> sum_k h_jk d^a x_k (+ h0_j when a = 0)."""
    mapping = {}
    for s in f.symbols():
        if s.kind != X:
            continue
        j = s.index[0]
        if j > a.n:
            raise ValueError("x%d outside the group's dimension %d" % (j, a.n))
        acc = ZERO
        for k in range(a.n):
            c = a.h[j - 1][k]
            if not c.is_zero():
                acc = acc + c * DiffRational.symbol(x_sym(k + 1, s.alpha))
        if s.order == 0:
            acc = acc + a.h0[j - 1]
        mapping[s] = acc
    return f.subs(mapping).cancel()


def gauge_act(f: DiffRational, g: GaugeMatrix, check: bool = True, peel: str = "first") -> DiffRational:
    """f with the derivations replaced by g^{-1} d."""
    if check:
        w = gl_partial_witness(g)
        if w is not None:
            raise NotGaugeCompatible("d_%d g_%d%d != d_%d g_%d%d" % (w[0], w[1], w[2], w[1], w[0], w[2]))
    return delta_substitute(f, g, peel=peel)


def joint_act(f: DiffRational, g: GaugeMatrix, a: AffineElement, check: bool = True) -> DiffRational:
    return affine_act(gauge_act(f, g, check=check), a)


def gl_delta_coset_check(g: GaugeMatrix, g2: GaugeMatrix) -> bool:
    """True iff g^{-1} g2 is symmetric for delta = g^{-1} d."""
    for gg in (g, g2):
        if not is_gl_partial(gg):
            raise NotGaugeCompatible("coset check needs GL^d gauges")
    h = linalg.matmul(g.inverse(), g2.entries)
    ops = DeltaOperators(g)
    m = g.m
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            for k in range(1, m + 1):
                if not equals(ops.apply(h[j - 1][k - 1], i), ops.apply(h[i - 1][k - 1], j)):
                    return False
    return True


def gauge_transport(ctx: Context, a: Sequence, b: Sequence, avoid: Iterable[DiffRational] = ()) -> GaugeMatrix:
    """A matrix T with a T = b.

    Rows other than the pivot row p hold t_ij = d_i s_j for fresh potentials
    s_1..s_m; row p is (b - sum_{i != p} a_i row_i) / a_p.
    """
    a = [DiffRational.coerce(v) for v in a]
    b = [DiffRational.coerce(v) for v in b]
    m = ctx.m
    if len(a) != m or len(b) != m:
        raise ValueError("a and b must have length m")
    if all(v.is_zero() for v in a) or all(v.is_zero() for v in b):
        raise ZeroVector("gauge transport needs nonzero a and b")
    p = next(i for i, v in enumerate(a) if not v.is_zero())
    start = max_potential_index(list(a) + list(b) + list(avoid)) + 1
    rows: List[Optional[List[DiffRational]]] = [None] * m
    for i in range(m):
        if i != p:
            rows[i] = [DiffRational.symbol(s_sym(start + j, unit_index(i + 1, m))) for j in range(m)]
    pivot_row = []
    for j in range(m):
        acc = b[j]
        for i in range(m):
            if i != p and not a[i].is_zero():
                acc = acc - a[i] * rows[i][j]
        pivot_row.append((acc / a[p]).cancel())
    rows[p] = pivot_row
    return GaugeMatrix(rows)
