import random
from fractions import Fraction

import pytest

from acx import linalg
from acx.linalg import (
    AmbientMismatch,
    ExactMatrix,
    NotContained,
    full_space,
    image,
    intersect,
    kernel,
    preimage,
    quotient_dim,
    rank,
    realify,
    realify_vector,
    solve,
    solve_many,
    subspace_from_vectors,
    sum_spaces,
    zero_space,
)
from acx.scalars import I, MINUS_ONE, ONE, ZERO, Scalar, integer


def rand_scalar(rng, density=0.5):
    if rng.random() > density:
        return ZERO
    return Scalar(Fraction(rng.randint(-3, 3), rng.randint(1, 3)), Fraction(rng.randint(-3, 3), rng.randint(1, 3)))


def rand_matrix(rng, rows, cols, density=0.4):
    entries = {}
    for r in range(rows):
        for c in range(cols):
            v = rand_scalar(rng, density)
            if v:
                entries[(r, c)] = v
    return ExactMatrix(rows, cols, entries)


def test_rank_examples():
    assert rank(ExactMatrix.zeros(3, 3)) == 0
    m = ExactMatrix.from_rows([[ONE, I], [I, MINUS_ONE]])
    assert rank(m) == 1
    assert rank(ExactMatrix.identity(4)) == 4


def test_kernel_examples():
    assert kernel(ExactMatrix.identity(2)).dim == 0
    assert kernel(ExactMatrix.zeros(2, 3)).dim == 3
    m = ExactMatrix.from_rows([[ONE, I], [I, MINUS_ONE]])
    k = kernel(m)
    assert k.dim == 1
    for v in k.basis:
        assert not any(m.apply(v))


def test_image_examples():
    assert image(ExactMatrix.identity(3)).dim == 3
    assert image(ExactMatrix.zeros(3, 2)).dim == 0


def test_rank_nullity_random():
    rng = random.Random(20260810)
    for _ in range(40):
        rows, cols = rng.randint(1, 7), rng.randint(1, 7)
        m = rand_matrix(rng, rows, cols)
        assert rank(m) + kernel(m).dim == cols
        assert image(m).dim == rank(m)


def test_solve_roundtrip_random():
    rng = random.Random(99)
    for _ in range(30):
        rows, cols = rng.randint(1, 6), rng.randint(1, 6)
        m = rand_matrix(rng, rows, cols)
        x = tuple(rand_scalar(rng, 0.8) for _ in range(cols))
        b = m.apply(x)
        got = solve(m, b)
        assert got is not None
        assert m.apply(got) == b
        rev = solve(m, b, reverse_pivots=True)
        assert rev is not None and m.apply(rev) == b


def test_solve_unsolvable():
    m = ExactMatrix.zeros(2, 2)
    assert solve(m, (ONE, ZERO)) is None
    assert solve(ExactMatrix.identity(3), (ONE, I, ZERO)) == (ONE, I, ZERO)


def test_solve_many_matches_solve():
    rng = random.Random(5)
    m = rand_matrix(rng, 5, 4)
    good = m.apply(tuple(rand_scalar(rng, 0.9) for _ in range(4)))
    bad = tuple(ONE for _ in range(5))
    results = solve_many(m, [good, bad])
    assert results[0] is not None and m.apply(results[0]) == good
    assert results[0] == solve(m, good)
    assert results[1] == solve(m, bad)


def test_intersect_examples_and_order():
    f = full_space(3)
    assert intersect([f, f]).dim == 3
    e1 = subspace_from_vectors(2, [(ONE, ZERO)])
    e2 = subspace_from_vectors(2, [(ZERO, ONE)])
    assert intersect([e1, e2]).dim == 0
    rng = random.Random(3)
    for _ in range(15):
        spaces = [image(rand_matrix(rng, 5, rng.randint(1, 4), 0.7)) for _ in range(3)]
        dims = set()
        for order in ([0, 1, 2], [2, 0, 1], [1, 2, 0]):
            dims.add(intersect([spaces[i] for i in order]).dim)
        assert len(dims) == 1
        inter = intersect(spaces)
        for v in inter.basis:
            assert all(s.contains(v) for s in spaces)


def test_intersect_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        intersect([full_space(2), full_space(3)])


def test_quotient_dim():
    f = full_space(4)
    z = zero_space(4)
    assert quotient_dim(f, z) == 4
    assert quotient_dim(f, f) == 0
    line = subspace_from_vectors(2, [(ONE, ZERO)])
    other = subspace_from_vectors(2, [(ZERO, ONE)])
    with pytest.raises(NotContained):
        quotient_dim(line, other)
    rng = random.Random(17)
    for _ in range(20):
        m = rand_matrix(rng, 5, 5, 0.5)
        im = image(m)
        sub = subspace_from_vectors(5, im.basis[: max(0, im.dim - 1)])
        assert quotient_dim(im, sub) + sub.dim == im.dim


def test_preimage():
    m = ExactMatrix.from_rows([[ONE, ZERO], [ZERO, ONE], [ZERO, ZERO]])
    w = subspace_from_vectors(3, [(ONE, ZERO, ZERO)])
    pre = preimage(m, w)
    assert pre.dim == 1
    assert pre.contains((ONE, ZERO))


def test_sum_spaces():
    e1 = subspace_from_vectors(3, [(ONE, ZERO, ZERO)])
    e2 = subspace_from_vectors(3, [(ZERO, ONE, ZERO)])
    assert sum_spaces([e1, e2]).dim == 2


def test_subspace_equality_is_canonical():
    two = integer(2)
    a = subspace_from_vectors(2, [(two, two)])
    b = subspace_from_vectors(2, [(ONE, ONE)])
    assert a == b


def test_realify_respects_products():
    rng = random.Random(23)
    m = rand_matrix(rng, 3, 4, 0.8)
    x = tuple(rand_scalar(rng, 0.9) for _ in range(4))
    lhs = realify_vector(m.apply(x))
    rhs = realify(m).apply(realify_vector(x))
    assert lhs == rhs
