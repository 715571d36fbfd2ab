import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from tritrans import srg, talg, verifier

matrices = st.integers(1, 6).flatmap(
    lambda r: st.integers(1, 6).flatmap(
        lambda c: st.lists(st.lists(st.integers(-5, 5), min_size=c, max_size=c),
                           min_size=r, max_size=r)))


@settings(max_examples=150, deadline=None)
@given(rows=matrices)
def test_span_rank_matches_sympy(rows):
    span = talg.MatSpan(len(rows[0]))
    for r in rows:
        span.add(np.array(r))
    assert span.dim == sympy.Matrix(rows).rank()


@settings(max_examples=50, deadline=None)
@given(rows=matrices, scale=st.integers(-3, 3).filter(bool))
def test_span_contains_combinations(rows, scale):
    span = talg.MatSpan(len(rows[0]))
    for r in rows:
        span.add(np.array(r))
    combo = scale * np.array(rows[0]) + np.array(rows[-1])
    assert span.contains(combo)


def test_big_integers_do_not_overflow():
    big = 1 << 61
    a = np.array([big, 1, 0])
    b = np.array([big - 1, 0, 1])
    c = np.array([1, 1, -1])
    span = talg.MatSpan(3)
    span.add(a)
    span.add(b)
    # a - b = (1, 1, -1) is dependent; a float rank would lose this
    assert span.contains(c)
    assert span.add(np.array([3, 0, 0])) is not None
    assert span.dim == 3
    assert talg.rational_rank([np.array([[big, big + 1]]), np.array([[big + 1, big + 2]])]) == 2


def test_exact_mat_normalises():
    m = talg.ExactMat(np.array([[2, 4], [6, 8]]), 4)
    assert m.den == 2 and m.num.tolist() == [[1, 2], [3, 4]]
    with pytest.raises(ValueError):
        talg.ExactMat(np.eye(2, dtype=np.int64), 0)
    prod = m @ talg.ExactMat(np.eye(2, dtype=np.int64), 3)
    assert prod.den == 6


def test_rank_shape_mismatch():
    with pytest.raises(ValueError):
        talg.rational_rank([np.eye(2), np.eye(3)])


@pytest.mark.parametrize("sel,t0", [
    (("qminus5", 2), 15), (("qminus5", 4), 15), (("vo", 2, -1), 14), (("vo", 4, 1), 15),
    (("reference", "cycle5"), 13), (("reference", "petersen"), 14),
    (("reference", "complete_multipartite(3,3)"), 12),
])
def test_dim_t0(sel, t0):
    g, _ = verifier.instance_action(sel)
    res = talg.dim_T0(g)
    assert res.dim == t0
    assert sum(map(sum, res.block_counts())) == t0


def test_triangle_criterion_scope():
    assert talg.triangle_criterion(srg.build_reference("complete_multipartite(3,3)")) is None
    assert talg.triangle_criterion(srg.cycle5()) is None
    assert talg.triangle_criterion(srg.petersen()) == 14
    assert talg.triangle_criterion(srg.paley(13)) == 15


@pytest.mark.parametrize("family,dim_t", [
    ("cycle5", 13), ("grid(3)", 15), ("paley9", 15), ("paley13", 21), ("petersen", 15),
    ("complete_multipartite(3,3)", 12),
])
def test_closure_dimension(family, dim_t):
    g = srg.build_reference(family)
    assert talg.dim_T_closure(g) == dim_t
    assert talg.dim_T_closure(g, seed=3) == dim_t


def test_closure_bounds():
    g = srg.paley(13)
    with pytest.raises(talg.ClosureError):
        talg.dim_T_closure(g, max_dim=16)
    with pytest.raises(ValueError):
        talg.dim_T_closure(srg.build_qminus_graph(4))


def test_closure_independent_of_base():
    g = srg.build_vo_graph(2, 1)
    assert talg.dim_T_closure(srg.rebased(g, 7)) == talg.dim_T_closure(g) == 15


def test_triple_regularity():
    assert talg.triple_regularity_check(srg.paley(9)).regular
    bad = talg.triple_regularity_check(srg.paley(13))
    assert not bad.regular
    assert bad.counterexample["counts"] != bad.counterexample["reference"]
    assert talg.triple_regularity_check(srg.build_vo_graph(3, -1), sample=4).regular


def test_export_files(tmp_path):
    g = srg.build_vo_graph(2, -1)
    dim, span = talg.dim_T_closure(g, return_span=True)
    talg.export_basis(span, g.v, tmp_path / "basis.txt")
    lines = (tmp_path / "basis.txt").read_text().splitlines()[1:]
    assert {int(ln.split()[0]) for ln in lines} == set(range(dim))
    talg.export_t0(g, tmp_path / "t0.txt")
    lines = (tmp_path / "t0.txt").read_text().splitlines()[1:]
    # the 27 products partition the v x v entries
    assert len(lines) == g.v * g.v
