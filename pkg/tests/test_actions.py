import random
import time
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import dpolys
from diffinv import linalg
from diffinv.actions import (
    AffineElement,
    DeltaOperators,
    FiniteGroup,
    GaugeMatrix,
    GroupClosureExceeded,
    NotGaugeCompatible,
    ZeroVector,
    affine_act,
    delta_substitute,
    gauge_act,
    gauge_transport,
    general_affine,
    generic_gauge,
    gl_delta_coset_check,
    gl_partial_witness,
    group_closure,
    is_gl_partial,
    joint_act,
    permutation_group,
    sign_group,
    translations,
)
from diffinv.diffcore import ONE, ZERO, Context, DiffRational, equals, is_zero_probabilistic, s_sym, substitute, x_sym, z_sym
from diffinv.invariants import wronskian


def const(v):
    return DiffRational.const(v)


# -- worked examples


def test_affine_translation_example():
    c = Context(m=1, n=2, parameters=("c",))
    a = AffineElement.translation([c.param("c"), ZERO])
    assert equals(affine_act(c.x(1), a), c.x(1) + c.param("c"))
    assert affine_act(c.x(1, (1,)), a) == c.x(1, (1,))


def test_affine_wronskian_scales_by_det():
    c = Context(m=1, n=2)
    g = general_affine(2)
    a = g.elements()[0]
    w = wronskian(c, [(1,), (2,)])
    assert equals(affine_act(w, a), linalg.det(a.h) * w)


def test_affine_element_rejects_nonconstant_and_singular():
    c = Context(m=1, n=1)
    with pytest.raises(ValueError):
        AffineElement([[c.x(1)]], [ZERO])
    with pytest.raises(ValueError):
        AffineElement([[ZERO]], [ZERO])


def test_is_gl_partial_examples():
    c1 = Context(m=1, n=1)
    assert is_gl_partial(GaugeMatrix([[c1.x(1) ** 2 + 1]]))
    c2 = Context(m=2, n=2)
    jac = [[c2.s(1, (1, 0)), c2.s(2, (1, 0))], [c2.s(1, (0, 1)), c2.s(2, (0, 1))]]
    assert is_gl_partial(GaugeMatrix(jac))
    bad = GaugeMatrix([[ONE, c2.x(1)], [ZERO, ONE]])
    assert not is_gl_partial(bad)
    i, j, k, diff = gl_partial_witness(bad)
    assert not diff.is_zero()


def test_generic_gauge_examples():
    g1 = generic_gauge(Context(m=1, n=1))
    assert str(g1.det) == "D[1](s1)"
    c2 = Context(m=2, n=2)
    g2 = generic_gauge(c2)
    want = c2.s(1, (1, 0)) * c2.s(2, (0, 1)) - c2.s(2, (1, 0)) * c2.s(1, (0, 1))
    assert equals(g2.det, want)
    for m in (1, 2, 3):
        assert is_gl_partial(generic_gauge(Context(m=m, n=1)))


def test_generic_gauge_avoids_potentials():
    c = Context(m=1, n=1)
    g = generic_gauge(c, avoid=[c.s(3)])
    assert all(s.index[0] >= 4 for s in g.det.symbols())


def test_gauge_act_examples():
    c = Context(m=1, n=1)
    g = generic_gauge(c)
    gamma = g[0, 0]
    assert gauge_act(c.x(1), g) == c.x(1)
    assert equals(gauge_act(c.x(1, (1,)), g), c.x(1, (1,)) / gamma)
    dgamma = c.s(1, (2,))
    want = c.x(1, (2,)) / gamma ** 2 - dgamma / gamma ** 3 * c.x(1, (1,))
    assert equals(gauge_act(c.x(1, (2,)), g), want)


def test_gauge_act_rejects_non_symmetric():
    c = Context(m=2, n=1)
    with pytest.raises(NotGaugeCompatible):
        gauge_act(c.x(1, (1, 0)), GaugeMatrix([[ONE, c.x(1)], [ZERO, ONE]]))


def test_joint_act_examples():
    c = Context(m=1, n=2, parameters=("p",))
    f = c.x(2, (1,)) / c.x(1, (1,))
    ident = GaugeMatrix([[ONE]])
    assert equals(joint_act(f, ident, AffineElement.identity(2)), f)
    assert joint_act(c.param("p") + 3, generic_gauge(c), AffineElement.identity(2)) == c.param("p") + 3
    g = generic_gauge(c)
    a = translations(2).elements()[0]
    assert equals(joint_act(f, g, a), f)


def test_coset_check_examples():
    c2 = Context(m=2, n=1)
    g = generic_gauge(c2)
    assert gl_delta_coset_check(g, g)
    g2 = generic_gauge(c2, start=3)
    assert gl_delta_coset_check(g, g2)
    c1 = Context(m=1, n=1)
    assert gl_delta_coset_check(generic_gauge(c1), GaugeMatrix([[c1.x(1)]]))


def test_gauge_transport_examples():
    c1 = Context(m=1, n=2)
    a, b = c1.x(1, (1,)), c1.x(2) + 1
    t = gauge_transport(c1, [a], [b])
    assert equals(t[0, 0], b / a)
    assert equals(gauge_transport(c1, [a], [a])[0, 0], ONE)
    c2 = Context(m=2, n=2)
    b1, b2 = c2.x(1), c2.x(2, (0, 1))
    t = gauge_transport(c2, [ONE, ZERO], [b1, b2])
    row = linalg.matmul([[ONE, ZERO]], t.entries)[0]
    assert equals(row[0], b1) and equals(row[1], b2)
    with pytest.raises(ZeroVector):
        gauge_transport(c2, [ZERO, ZERO], [b1, b2])


def test_gauge_transport_general_vectors():
    c = Context(m=3, n=2)
    a = [c.x(1), ZERO, c.x(2, (0, 1, 0))]
    b = [ONE, c.x(1, (1, 0, 0)), c.x(2)]
    t = gauge_transport(c, a, b)
    got = linalg.matmul([a], t.entries)[0]
    assert all(equals(u, v) for u, v in zip(got, b))
    assert not t.det.is_zero()


def test_finite_groups_and_closure():
    assert len(permutation_group(3).elements()) == 6
    sg = sign_group(2)
    assert len(group_closure(sg.elements())) == 2
    rot = AffineElement.linear([[ZERO, -ONE], [ONE, ZERO]])
    assert len(group_closure([rot])) == 4
    with pytest.raises(GroupClosureExceeded):
        group_closure([AffineElement.translation([ONE])], bound=10)
    with pytest.raises(ValueError):
        FiniteGroup([rot, AffineElement.identity(2)])


# -- properties


def rand_element(rng, n):
    while True:
        h = [[const(Fraction(rng.randint(-3, 3), rng.randint(1, 2))) for _ in range(n)] for _ in range(n)]
        if not linalg.det(h).is_zero():
            return AffineElement(h, [const(rng.randint(-3, 3)) for _ in range(n)])


@given(dpolys(m=1, n=2, max_order=2), st.integers(0, 10 ** 6))
def test_group_action_law(f, seed):
    rng = random.Random(seed)
    a, b = rand_element(rng, 2), rand_element(rng, 2)
    lhs = affine_act(affine_act(f, b), a)
    # substitution is a right action: acting by b then a is acting by b after a
    rhs = affine_act(f, b.compose(a))
    assert equals(lhs, rhs)


@given(dpolys(m=2, n=2, max_order=1))
def test_joint_act_order_independent(f):
    c = Context(m=2, n=2)
    g = generic_gauge(c)
    a = general_affine(2).elements()[0]
    assert equals(affine_act(gauge_act(f, g), a), gauge_act(affine_act(f, a), g))


@pytest.mark.parametrize("alpha", [(1, 1), (2, 1), (1, 2), (0, 3), (3, 0)])
def test_peel_order_independence(alpha):
    c = Context(m=2, n=1)
    ops = DeltaOperators(generic_gauge(c))
    x1 = c.x(1)
    assert equals(ops.apply_multi(x1, alpha, peel="first"), ops.apply_multi(x1, alpha, peel="last"))


def test_delta_commutativity_and_witness():
    c = Context(m=2, n=2)
    ops = DeltaOperators(generic_gauge(c))
    x1 = c.x(1)
    assert equals(ops.apply(ops.apply(x1, 2), 1), ops.apply(ops.apply(x1, 1), 2))
    bad = DeltaOperators(GaugeMatrix([[ONE, c.x(1)], [ZERO, ONE]]))
    diff = bad.apply(bad.apply(x1, 2), 1) - bad.apply(bad.apply(x1, 1), 2)
    assert not diff.cancel().is_zero()


def first_row_substitution(p, g):
    """p(z1_1, .., z1_m) evaluated at the first row of g."""
    return substitute(p, {z_sym(1, j): g.entries[0][j - 1] for j in range(1, g.m + 1)})


def random_z_poly(rng, m, terms=3, deg=3):
    acc = ZERO
    while acc.is_zero():
        for _ in range(terms):
            mono = const(rng.choice([-3, -2, -1, 1, 2, 3]))
            for _ in range(rng.randint(0, deg)):
                mono = mono * DiffRational.symbol(z_sym(1, rng.randint(1, m)))
            acc = acc + mono
    return acc


def test_first_row_substitution_nonvanishing():
    c = Context(m=2, n=2)
    g = generic_gauge(c)
    rng = random.Random(2024)
    for t in range(25):
        p = random_z_poly(rng, 2)
        assert not is_zero_probabilistic(first_row_substitution(p, g), 8, seed=t)


def test_first_row_entries_independent():
    # the first-row entries of a generic gauge have full jet rank as functions of the potentials
    c = Context(m=3, n=1)
    g = generic_gauge(c)
    coords = sorted(set().union(*(e.symbols() for e in g.entries[0])))
    jac = [[e.partial(s) for s in coords] for e in g.entries[0]]
    assert linalg.rank(jac) == 3


def test_products_leave_symmetric_class():
    # products of gauges stay in the symmetric class only through the coset rule
    c = Context(m=2, n=1)
    g, g2 = generic_gauge(c), generic_gauge(c, start=3)
    assert is_gl_partial(g) and is_gl_partial(g2)
    prod = GaugeMatrix(linalg.matmul(g.entries, g2.entries))
    assert not is_gl_partial(prod)
