"""Construction and verification of differential invariants.

Covers generalized Wronskians and their bordered-determinant equations,
invariance and frame checks, rewriting along a frame, linear dependence
over constants, jet-level rank certificates and the finite-group recipe
built on tuple invariants.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, List, Optional, Sequence

from . import linalg
from .actions import (
    AffineElement,
    DeltaOperators,
    FiniteGroup,
    GaugeMatrix,
    GroupClosureExceeded,
    GroupPresentation,
    affine_act,
    generic_gauge,
    gl_partial_witness,
    group_closure,
    joint_act,
    max_potential_index,
)
from .diffcore import (
    ONE,
    P,
    S,
    U,
    X,
    Z,
    ZERO,
    Context,
    DiffAlgebraError,
    DiffRational,
    Poly,
    Sym,
    agree_probabilistic,
    derive_multi,
    equals,
    u_sym,
    x_sym,
    z_sym,
)

__all__ = [
    "AlphaSet", "AutoRaiseOrder", "CheckReport", "DegenerateAlphaSet", "FrameCheckFailed",
    "GaugeFrame", "GeneratorSet", "GroupClosureExceeded", "KernelNotFound", "LinDep",
    "NotInvariant", "bordered_equation", "bordered_invariant_coeffs", "character_cocycle_check",
    "delta_rewrite", "delta_rewrite_matrix", "frame_check", "instantiate_tuple_invariant",
    "invariance_check", "jet_derivation", "jet_jacobian_rank", "lindep_constants",
    "reynolds_average", "tuple_act", "tuple_invariance_check", "verify_delta_relation", "wronskian",
]


class DegenerateAlphaSet(DiffAlgebraError):
    pass


class KernelNotFound(DiffAlgebraError):
    pass


class FrameCheckFailed(DiffAlgebraError):
    pass


class NotInvariant(DiffAlgebraError):
    pass


class AutoRaiseOrder(DiffAlgebraError):
    def __init__(self, minimal_order: int):
        super().__init__("jet order too small; need at least %d" % minimal_order)
        self.minimal_order = minimal_order


@dataclass
class CheckReport:
    check: str
    passed: bool
    element: Optional[str] = None
    witness: Optional[str] = None
    detail: Optional[str] = None

    def __bool__(self) -> bool:
        return self.passed

    def to_record(self) -> dict:
        return {"check": self.check, "element": self.element, "witness": self.witness,
                "pass": self.passed}


class AlphaSet(tuple):
    """n distinct nonzero multi-indices of length m."""

    def __new__(cls, ctx: Context, alphas: Iterable[Iterable[int]]):
        items = tuple(ctx.alpha(a) for a in alphas)
        if len(items) != ctx.n:
            raise ValueError("need exactly n=%d multi-indices, got %d" % (ctx.n, len(items)))
        if any(not any(a) for a in items):
            raise ValueError("multi-indices must be nonzero")
        if len(set(items)) != len(items):
            raise ValueError("multi-indices must be pairwise distinct")
        return super().__new__(cls, items)


def _jet_column(ctx: Context, alpha: tuple, var: Optional[DiffRational] = None) -> List[DiffRational]:
    col = [DiffRational.symbol(x_sym(j, alpha)) for j in range(1, ctx.n + 1)]
    if var is not None:
        col.append(derive_multi(var, alpha))
    return col


def wronskian(ctx: Context, alphas: Sequence[Sequence[int]]) -> DiffRational:
    """det[d^{a1} x, ..., d^{an} x] with the k-th column d^{ak} x."""
    alphas = AlphaSet(ctx, alphas)
    cols = [_jet_column(ctx, a) for a in alphas]
    mat = [[cols[k][j] for k in range(ctx.n)] for j in range(ctx.n)]
    return linalg.det(mat)


def bordered_invariant_coeffs(ctx: Context, alphas: Sequence[Sequence[int]], alpha: Sequence[int]) -> List[DiffRational]:
    """Coefficients c_1..c_{n+1} of the bordered equation, each divided by the Wronskian.

    The equation in y reads sum_k c_k d^{ak} y + c_{n+1} d^{alpha} y = 0 and
    is solved by every y = x_i; c_{n+1} == 1.
    """
    alphas = AlphaSet(ctx, alphas)
    alpha = ctx.alpha(alpha)
    if not any(alpha):
        raise ValueError("alpha must be nonzero")
    if alpha in alphas:
        raise ValueError("alpha must not belong to alphas")
    w = wronskian(ctx, alphas)
    if w.is_zero():
        raise DegenerateAlphaSet("Wronskian vanishes identically")
    n = ctx.n
    cols = [_jet_column(ctx, a) for a in alphas] + [_jet_column(ctx, alpha)]
    top = [[cols[k][j] for k in range(n + 1)] for j in range(n)]
    coeffs = []
    for k in range(n + 1):
        minor = [[row[c] for c in range(n + 1) if c != k] for row in top]
        cof = linalg.det(minor)
        if (n + k) % 2:
            cof = -cof
        coeffs.append((cof / w).cancel())
    return coeffs


def bordered_equation(ctx: Context, alphas, alpha, y: DiffRational,
                      coeffs: Optional[List[DiffRational]] = None) -> DiffRational:
    """Left side of the bordered equation evaluated at y."""
    alphas = AlphaSet(ctx, alphas)
    alpha = ctx.alpha(alpha)
    if coeffs is None:
        coeffs = bordered_invariant_coeffs(ctx, alphas, alpha)
    acc = ZERO
    for c, a in zip(coeffs, list(alphas) + [alpha]):
        acc = acc + c * derive_multi(y, a)
    return acc.cancel()


# --------------------------------------------------------------------------
# invariance


def _check_x_only(f: DiffRational) -> None:
    for s in f.symbols():
        if s.kind not in (X, P):
            raise ValueError("expected a function of x-symbols and parameters, found %s" % (s,))


def invariance_check(ctx: Context, f: DiffRational, group: GroupPresentation, gauge: bool = False,
                     method: str = "exact", trials: Optional[int] = None,
                     seed: Optional[int] = None) -> CheckReport:
    """Is f fixed by every listed element of H (and by generic gauges when ``gauge``)?"""
    _check_x_only(f)
    if method not in ("exact", "randomized"):
        raise ValueError("method must be 'exact' or 'randomized'")
    trials = ctx.trials if trials is None else trials
    seed = ctx.seed if seed is None else seed
    name = "invariance(%s%s)" % (group.name, ", gauge" if gauge else "")
    G = generic_gauge(ctx, avoid=[f]) if gauge else None
    for a in group.elements():
        image = joint_act(f, G, a, check=False) if gauge else affine_act(f, a)
        if method == "exact":
            ok = equals(image, f)
        else:
            ok = agree_probabilistic(image, f, trials, seed, ctx.eval_range, ctx.retries)
        if not ok:
            return CheckReport(name, False, str(a), str((image - f).cancel()))
    return CheckReport(name, True)


def frame_check(ctx: Context, phi, group: GroupPresentation) -> CheckReport:
    """Check symmetry of phi and the transport law Phi^{G^-1 d}<hx+h0> = G^-1 Phi."""
    phi = [[DiffRational.coerce(v) for v in row] for row in phi]
    m = ctx.m
    if len(phi) != m or any(len(r) != m for r in phi):
        return CheckReport("frame", False, detail="phi must be %d x %d" % (m, m))
    try:
        Phi = GaugeMatrix(phi)
    except ValueError:
        return CheckReport("frame", False, detail="phi is singular")
    w = gl_partial_witness(Phi)
    if w is not None:
        i, j, k, diff = w
        return CheckReport("frame", False, witness=str(diff),
                           detail="symmetry fails: d_%d phi_%d%d != d_%d phi_%d%d" % (i, j, k, j, i, k))
    G = generic_gauge(ctx, avoid=[e for row in phi for e in row])
    target = linalg.matmul(G.inverse(), phi)
    for a in group.elements():
        for i in range(m):
            for j in range(m):
                image = joint_act(phi[i][j], G, a, check=False)
                if not equals(image, target[i][j]):
                    return CheckReport("frame", False, str(a), str((image - target[i][j]).cancel()),
                                       "entry (%d,%d)" % (i + 1, j + 1))
    return CheckReport("frame", True)


class GaugeFrame:
    """A verified frame Phi for a group H; construct with ``GaugeFrame.build``."""

    def __init__(self, phi: GaugeMatrix, group: GroupPresentation, _token=None):
        if _token is not _BUILD_TOKEN:
            raise TypeError("use GaugeFrame.build to construct a verified frame")
        self.phi = phi
        self.group = group

    @classmethod
    def build(cls, ctx: Context, phi, group: GroupPresentation) -> "GaugeFrame":
        report = frame_check(ctx, phi, group)
        if not report:
            raise FrameCheckFailed("frame check failed: %s %s" % (report.detail or "", report.witness or ""))
        return cls(GaugeMatrix(phi), group, _BUILD_TOKEN)

    @property
    def m(self) -> int:
        return self.phi.m


_BUILD_TOKEN = object()


def delta_rewrite(f: DiffRational, frame: GaugeFrame) -> DiffRational:
    """f^delta with delta = Phi^{-1} d."""
    from .actions import gauge_act

    return gauge_act(f, frame.phi, check=False)


def delta_rewrite_matrix(frame: GaugeFrame) -> List[List[DiffRational]]:
    return [[delta_rewrite(e, frame) for e in row] for row in frame.phi.entries]


def verify_delta_relation(relation: DiffRational, values: Sequence[DiffRational], frame: GaugeFrame) -> bool:
    """Does ``relation`` vanish when its potentials s_i are read as the values, with delta derivations?

    Each d^b s_i in ``relation`` is replaced by delta^b(values[i-1]).
    """
    ops = DeltaOperators(frame.phi)
    mapping = {}
    for s in relation.symbols():
        if s.kind != S:
            continue
        i = s.index[0]
        if i > len(values):
            raise ValueError("relation uses s%d but only %d values were given" % (i, len(values)))
        mapping[s] = ops.apply_multi(DiffRational.coerce(values[i - 1]), s.alpha)
    return relation.subs(mapping).is_zero()


@dataclass
class GeneratorSet:
    """Candidate generators of the H-invariant field; every member is checked."""

    members: List[DiffRational]
    group: GroupPresentation
    ctx: Context = field(repr=False, default=None)

    def __post_init__(self):
        if self.ctx is None:
            raise ValueError("GeneratorSet needs a context")
        for f in self.members:
            rep = invariance_check(self.ctx, f, self.group)
            if not rep:
                raise NotInvariant("%s is not invariant: %s" % (f, rep.witness))

    def delta_rewrite(self, frame: GaugeFrame) -> List[DiffRational]:
        return [delta_rewrite(f, frame) for f in self.members]


def character_cocycle_check(ctx: Context, k: int) -> CheckReport:
    """det^k(T) == det^k(S) * det^k(S^-1 T) for two independent generic gauges."""
    T = generic_gauge(ctx, start=1)
    S_ = generic_gauge(ctx, start=ctx.m + 1)
    quotient = linalg.matmul(S_.inverse(), T.entries)
    lhs = T.det ** k
    rhs = S_.det ** k * linalg.det(quotient) ** k
    ok = equals(lhs, rhs)
    return CheckReport("character(det^%d)" % k, ok, witness=None if ok else str((lhs - rhs).cancel()))


# --------------------------------------------------------------------------
# linear dependence over constants


def jet_derivation(m: int):
    """The ordinary derivation d(a) = sum_i d_i(a) u_{i,1}, d(u_{j,k}) = u_{j,k+1}."""
    us = [Poly.symbol(u_sym(i, 1)) for i in range(1, m + 1)]

    def dsym(s: Sym) -> Optional[Poly]:
        if s.differentiable:
            acc = Poly()
            for i in range(m):
                acc = acc + us[i] * Poly.symbol(s.shifted(i))
            return acc
        if s.kind == U:
            return Poly.symbol(u_sym(s.index[0], s.index[1] + 1))
        return None

    return dsym


@dataclass
class LinDep:
    dependent: bool
    kernel: Optional[List[DiffRational]] = None
    determinant: Optional[DiffRational] = None

    def __bool__(self) -> bool:
        return self.dependent


def _normalize_kernel(vec: List[DiffRational]) -> List[DiffRational]:
    last = max(i for i, v in enumerate(vec) if not v.is_zero())
    scale = -vec[last]
    vec = [(v / scale).cancel() for v in vec]
    if all(v.is_const() for v in vec):
        den = 1
        for v in vec:
            den = lcm(den, Fraction(v.const_value()).denominator)
        vec = [v * den for v in vec]
    return vec


def lindep_constants(ctx: Context, b: Sequence[DiffRational], trials: int = 5,
                     seed: Optional[int] = None) -> LinDep:
    """Decide C-linear dependence of b via det[b, d b, ..., d^{l-1} b]."""
    b = [DiffRational.coerce(v) for v in b]
    l = len(b)
    if l < 1:
        raise ValueError("need at least one element")
    seed = ctx.seed if seed is None else seed
    dsym = jet_derivation(ctx.m)
    rows = [b]
    for _ in range(l - 1):
        rows.append([e.apply_derivation(dsym).cancel() for e in rows[-1]])
    rng = random.Random(seed)
    syms = sorted(set().union(*(e.symbols() for row in rows for e in row)))
    for _ in range(trials):
        point = {s: rng.randint(-ctx.eval_range, ctx.eval_range) for s in syms}
        try:
            num = [[e.evaluate(point) for e in row] for row in rows]
        except ZeroDivisionError:
            continue
        if linalg.rank_q(num) == l:
            return LinDep(False)
    det = linalg.det(rows)
    if not det.is_zero():
        return LinDep(False, determinant=det)
    return LinDep(True, _find_kernel(ctx, b, rng), det)


def _find_kernel(ctx: Context, b: List[DiffRational], rng: random.Random) -> List[DiffRational]:
    l = len(b)
    syms = sorted(s for s in set().union(*(e.symbols() for e in b)) if s.kind != P)
    npoints = l + 3
    for _ in range(ctx.retries):
        rows = []
        while len(rows) < npoints:
            point = {s: DiffRational.const(rng.randint(-ctx.eval_range, ctx.eval_range)) for s in syms}
            try:
                rows.append([e.subs(point).cancel() for e in b])
            except ZeroDivisionError:
                continue
        basis = linalg.nullspace(rows)
        if basis:
            vec = _normalize_kernel(basis[0])
            total = ZERO
            for c, e in zip(vec, b):
                total = total + c * e
            if total.is_zero() or equals(total, ZERO):
                return vec
        npoints += l
    raise KernelNotFound("no verified kernel vector after %d attempts" % ctx.retries)


# --------------------------------------------------------------------------
# jet-level rank certificates


def jet_jacobian_rank(ctx: Context, fs: Sequence[DiffRational], order: Optional[int] = None,
                      method: str = "exact", trials: Optional[int] = None,
                      seed: Optional[int] = None) -> int:
    """Rank of the Jacobian of fs with respect to the jet coordinates d^b x_j, |b| <= order."""
    fs = [DiffRational.coerce(f) for f in fs]
    top = 0
    for f in fs:
        for s in f.symbols():
            if s.kind not in (X, P):
                raise ValueError("jet rank expects x-symbols and parameters, found %s" % (s,))
            if s.kind == X:
                top = max(top, s.order)
    if order is None:
        order = top + 1
    if top > order:
        raise AutoRaiseOrder(top)
    coords = sorted({s for f in fs for s in f.symbols() if s.kind == X})
    if not coords or not fs:
        return 0
    jac = [[f.partial(c) for c in coords] for f in fs]
    if method == "exact":
        return linalg.rank(jac)
    if method != "randomized":
        raise ValueError("method must be 'exact' or 'randomized'")
    trials = ctx.trials if trials is None else trials
    rng = random.Random(ctx.seed if seed is None else seed)
    syms = sorted(set().union(*(e.symbols() for row in jac for e in row)) | set(coords))
    best = 0
    for _ in range(trials):
        point = {s: rng.randint(-ctx.eval_range, ctx.eval_range) for s in syms}
        try:
            num = [[e.evaluate(point) for e in row] for row in jac]
        except ZeroDivisionError:
            continue
        best = max(best, linalg.rank_q(num))
    return best


# --------------------------------------------------------------------------
# tuple invariants and the finite-group recipe


def tuple_act(p: DiffRational, a: AffineElement) -> DiffRational:
    """z^1 -> h z^1 + h0 and z^i -> h z^i for i >= 2."""
    mapping = {}
    n = a.n
    for s in p.symbols():
        if s.kind == P:
            continue
        if s.kind != Z:
            raise ValueError("tuple polynomial contains non-tuple symbol %s" % (s,))
        i, j = s.index
        acc = ZERO
        for k in range(n):
            c = a.h[j - 1][k]
            if not c.is_zero():
                acc = acc + c * DiffRational.symbol(z_sym(i, k + 1))
        if i == 1:
            acc = acc + a.h0[j - 1]
        mapping[s] = acc
    return p.subs(mapping).cancel()


def tuple_invariance_check(p: DiffRational, group: GroupPresentation) -> CheckReport:
    for a in group.elements():
        image = tuple_act(p, a)
        if not equals(image, p):
            return CheckReport("tuple-invariance", False, str(a), str((image - p).cancel()))
    return CheckReport("tuple-invariance", True)


def reynolds_average(p: DiffRational, group: FiniteGroup, bound: int = 10 ** 4) -> DiffRational:
    """(1/|H|) sum over the closure of H of tuple_act(p, a)."""
    if not isinstance(group, FiniteGroup):
        raise TypeError("Reynolds averaging needs a finite group")
    elems = group_closure(group.elements(), bound)
    acc = ZERO
    for a in elems:
        acc = acc + tuple_act(p, a)
    return (acc / len(elems)).cancel()


def instantiate_tuple_invariant(ctx: Context, p: DiffRational, alphas,
                                group: Optional[GroupPresentation] = None) -> DiffRational:
    """Substitute z^1 -> x and z^{i+1} -> d^{alpha_i} x."""
    alphas = AlphaSet(ctx, alphas)
    if group is not None:
        rep = tuple_invariance_check(p, group)
        if not rep:
            raise NotInvariant("tuple polynomial is not invariant: %s" % rep.witness)
    cols = [ctx.zero_alpha()] + list(alphas)
    mapping = {}
    for s in p.symbols():
        if s.kind == Z:
            i, j = s.index
            mapping[s] = DiffRational.symbol(x_sym(j, cols[i - 1]))
    return p.subs(mapping).cancel()
