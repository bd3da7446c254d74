import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from diffinv import linalg
from diffinv.diffcore import ONE, ZERO, Context, DiffRational, equals

ctx = Context(m=1, n=3)
X = [ctx.x(j) for j in (1, 2, 3)] + [ctx.x(j, (1,)) for j in (1, 2, 3)]


def rand_matrix(rng, n, density=0.7):
    rows = []
    for _ in range(n):
        row = []
        for _ in range(n):
            if rng.random() < density:
                row.append(rng.randint(-3, 3) * rng.choice(X) + rng.randint(-2, 2))
            else:
                row.append(ZERO)
        rows.append(row)
    return rows


def leibniz_det(mat):
    import itertools

    n = len(mat)
    acc = ZERO
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = ONE
        for i in range(n):
            term = term * mat[i][perm[i]]
        acc = acc - term if inv % 2 else acc + term
    return acc


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_det_matches_leibniz(n):
    rng = random.Random(n)
    for _ in range(3):
        m = rand_matrix(rng, n)
        assert equals(linalg.det(m), leibniz_det(m))


def test_bareiss_matches_cofactor_on_rationals():
    rng = random.Random(7)
    for _ in range(3):
        m = rand_matrix(rng, 5)
        m[0][0] = m[0][0] / (X[0] + 1)
        assert equals(linalg.det(m), leibniz_det(m))


def test_inverse_is_exact():
    rng = random.Random(3)
    m = rand_matrix(rng, 3, density=1.0)
    inv = linalg.inverse(m)
    prod = linalg.matmul(m, inv)
    for i in range(3):
        for j in range(3):
            assert equals(prod[i][j], ONE if i == j else ZERO)


def test_rank_and_nullspace():
    a, b = X[0], X[1]
    m = [[a, b, a + b], [2 * a, 2 * b, 2 * a + 2 * b], [ONE, ZERO, ONE]]
    assert linalg.rank(m) == 2
    basis = linalg.nullspace(m)
    assert len(basis) == 1
    for row in m:
        assert sum((r * v for r, v in zip(row, basis[0])), ZERO).is_zero()


@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=1, max_size=4))
def test_rank_q_agrees_with_symbolic_rank(rows):
    sym = [[DiffRational.const(v) for v in r] for r in rows]
    assert linalg.rank(sym) == linalg.rank_q(rows)


def test_singular_inverse_raises():
    with pytest.raises(ZeroDivisionError):
        linalg.inverse([[X[0], X[1]], [2 * X[0], 2 * X[1]]])
