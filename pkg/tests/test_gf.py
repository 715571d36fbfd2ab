import itertools

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from tritrans import gf

ORDERS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 49]


def test_prime_helpers():
    assert [n for n in range(30) if gf.is_prime(n)] == list(sympy.primerange(0, 30))
    assert gf.prime_factors(360) == [2, 3, 5]


@pytest.mark.parametrize("p,e", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (5, 2), (7, 2)])
def test_modulus_is_irreducible_and_smallest(p, e):
    mod = gf.smallest_irreducible(p, e)
    x = sympy.symbols("x")
    poly = sympy.Poly(list(reversed(mod)), x, modulus=p)
    assert poly.is_irreducible
    assert mod[-1] == 1 and len(mod) == e + 1
    # no monic irreducible with a smaller code of its lower coefficients
    code = sum(c * p**i for i, c in enumerate(mod[:-1]))
    for smaller in range(code):
        lower = [(smaller // p**i) % p for i in range(e)]
        assert not gf.is_irreducible(lower + [1], p)


@pytest.mark.parametrize("q", ORDERS)
def test_field_axioms_exhaustive(q):
    ctx = gf.field_of_order(q)
    els = list(ctx.elements())
    for a in els:
        assert ctx.add(a, ctx.neg(a)) == 0
        assert ctx.mul(a, 1) == a
        if a:
            assert ctx.mul(a, ctx.inv(a)) == 1
    # multiplicative group is cyclic with the stored generator
    powers = {ctx.pow(ctx.generator, k) for k in range(q - 1)}
    assert powers == set(range(1, q))


@pytest.mark.parametrize("q", [4, 8, 9, 25])
@settings(max_examples=200, deadline=None)
@given(data=st.data())
def test_distributive_and_associative(q, data):
    ctx = gf.field_of_order(q)
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert ctx.mul(a, ctx.add(b, c)) == ctx.add(ctx.mul(a, b), ctx.mul(a, c))
    assert ctx.mul(ctx.mul(a, b), c) == ctx.mul(a, ctx.mul(b, c))
    assert ctx.add(ctx.add(a, b), c) == ctx.add(a, ctx.add(b, c))


@pytest.mark.parametrize("q", [4, 8, 9, 27])
def test_frobenius_is_automorphism(q):
    ctx = gf.field_of_order(q)
    for a, b in itertools.product(range(q), repeat=2):
        assert ctx.frobenius(ctx.mul(a, b)) == ctx.mul(ctx.frobenius(a), ctx.frobenius(b))
        assert ctx.frobenius(ctx.add(a, b)) == ctx.add(ctx.frobenius(a), ctx.frobenius(b))
    assert all(ctx.frobenius(a, ctx.e) == a for a in range(q))


@pytest.mark.parametrize("q", [4, 9, 16])
def test_vector_ops_match_scalar(q):
    ctx = gf.field_of_order(q)
    a, b = np.meshgrid(np.arange(q), np.arange(q))
    assert all(ctx.vadd(a, b)[i, j] == ctx.add(int(a[i, j]), int(b[i, j]))
               for i in range(q) for j in range(q))
    assert all(ctx.vmul(a, b)[i, j] == ctx.mul(int(a[i, j]), int(b[i, j]))
               for i in range(q) for j in range(q))


def test_matmul_rows_small():
    ctx = gf.field_of_order(4)
    m = np.array([[1, 2], [3, 1]])
    rows = np.array([[1, 0], [0, 1], [2, 3]])
    out = ctx.matmul_rows(rows, m)
    for r, row in enumerate(rows):
        expect = [ctx.add(ctx.mul(int(m[j, 0]), int(row[0])), ctx.mul(int(m[j, 1]), int(row[1])))
                  for j in range(2)]
        assert list(out[r]) == expect


@pytest.mark.parametrize("q", [3, 5, 7, 9, 25])
def test_squares(q):
    ctx = gf.field_of_order(q)
    assert len(ctx.squares()) == (q - 1) // 2
    assert not ctx.is_square(ctx.find_nonsquare())
    assert ctx.find_nonsquare() == min(set(range(1, q)) - ctx.squares())


def test_errors():
    ctx = gf.field_of_order(4)
    with pytest.raises(ZeroDivisionError):
        ctx.inv(0)
    with pytest.raises(ValueError):
        ctx.find_nonsquare()
    with pytest.raises(ValueError):
        gf.field_of_order(6)
    with pytest.raises(ValueError):
        ctx.is_square(0)
    with pytest.raises(ValueError):
        gf.lemma_tech_solve(ctx, 1, 1)
    c9 = gf.field_of_order(9)
    with pytest.raises(ValueError):
        gf.lemma_tech_solve(c9, 1, c9.find_nonsquare())


@pytest.mark.parametrize("q", [4, 8, 16])
def test_trace_one_exists(q):
    ctx = gf.field_of_order(q)
    ones = [a for a in range(q) if ctx.trace(a) == 1]
    assert len(ones) == q // 2


def test_lemma_solution_is_lexicographically_first():
    ctx = gf.field_of_order(7)
    delta = ctx.find_nonsquare()
    for lam in range(1, 7):
        if ctx.is_square(lam):
            continue
        a, c = gf.lemma_tech_solve(ctx, delta, lam)
        sols = sorted((x, y) for x in range(7) for y in range(7)
                      if gf.binary_form(ctx, delta, x, y) == lam)
        assert (a, c) == sols[0]
