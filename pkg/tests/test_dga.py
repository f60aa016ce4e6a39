import random

import pytest
from hypothesis import given, strategies as st

from gkforge.dga import (
    DGAPresentation,
    FormElement,
    cohomology,
    extend_differential,
    massey_search,
    massey_triple,
    nonformality_witness,
    wedge_all,
)
from gkforge.errors import DifferentialError, GKForgeError, MasseyUndefinedError
from gkforge.exactlin import C, Subspace
from gkforge.liealg import LieAlgebra, ce_differential, check_jacobi, filtration

import oracle
from helpers import HEIS3, KT4, algebra, e, random_structure, to_fraction_tensor

N = 5
monomials = st.lists(st.integers(0, N - 1), max_size=N, unique=True).map(lambda ix: tuple(sorted(ix)))
forms = st.dictionaries(monomials, st.integers(-3, 3).filter(bool), max_size=4)


def as_form(d):
    out = FormElement()
    for idx, c in d.items():
        out = out + FormElement.monomial(idx, c)
    return out


def as_oracle(f):
    return {idx: int(c.re) for idx, c in f.sorted_terms()}


@given(forms, forms)
def test_wedge_matches_oracle(a, b):
    assert as_oracle(as_form(a).wedge(as_form(b))) == oracle.wedge(a, b)


@given(forms, forms, forms)
def test_wedge_associative(a, b, c):
    a, b, c = map(as_form, (a, b, c))
    assert (a ^ b) ^ c == a ^ (b ^ c)


@given(monomials, monomials)
def test_graded_commutativity(i, j):
    a, b = FormElement.monomial(i), FormElement.monomial(j)
    sign = -1 if len(i) * len(j) % 2 else 1
    assert a ^ b == (b ^ a).scale(sign)


@given(forms, forms, st.integers(0, N - 1))
def test_interior_is_antiderivation(a, b, j):
    a, b = as_form(a), as_form(b)
    for ka in range(N + 1):
        pa = a.part(ka)
        sign = -1 if ka % 2 else 1
        assert (pa ^ b).interior(j) == (pa.interior(j) ^ b) + (pa ^ b.interior(j)).scale(sign)


def test_monomial_order_sign():
    assert FormElement.monomial((1, 0)) == -FormElement.monomial((0, 1))
    assert not FormElement.monomial((1, 1))


def test_format():
    assert (e(1, 2) - e(3, c=2)).format() == "-2*e3+e1^e2"
    assert FormElement().format() == "0"


def test_vector_roundtrip():
    f = e(1, 3) + e(2, 4, c=C(0, 1))
    assert FormElement.from_vector(f.to_vector(4), 4) == f
    assert FormElement.from_vector(f.to_vector(4, 2), 4, 2) == f


def test_rejects_non_degree_two():
    with pytest.raises(DifferentialError):
        DGAPresentation([FormElement(), e(1)])


def test_rejects_d_squared():
    # d g1 = -g1 g3, d g3 = -g1 g2 gives d^2 g3 = -g1 g2 g3
    images = [-e(1, 3), FormElement(), -e(1, 2)]
    with pytest.raises(DifferentialError) as info:
        extend_differential(images)
    assert info.value.generator == 2


@pytest.mark.parametrize("g,expected", [(HEIS3, (1, 2, 2, 1)), (KT4, (1, 3, 4, 3, 1))])
def test_betti_examples(g, expected):
    assert ce_differential(g).cohomology.betti == expected


@given(st.integers(0, 10_000), st.integers(3, 5))
def test_betti_matches_oracle(seed, dim):
    c = random_structure(random.Random(seed), dim)
    g = LieAlgebra.from_tensor(to_fraction_tensor(c))
    if not check_jacobi(g).ok:
        return
    assert list(cohomology(ce_differential(g)).betti) == oracle.betti(c)


def test_d_matrix_matches_oracle():
    c = oracle.tensor(4, {(0, 1): {2: 1}, (0, 2): {3: 1}})
    A = ce_differential(algebra(4, (1, 2, 3, 1), (1, 3, 4, 1)))
    for k in range(4):
        assert [[int(x.re) for x in row] for row in A.matrix(k).data] == oracle.d_matrix(c, k).tolist()


def test_class_coordinates():
    H = ce_differential(KT4).cohomology
    assert H.is_exact(e(1, 2), 2)
    assert H.class_coordinates(e(1, 2), 2) == (C(0),) * 4
    with pytest.raises(GKForgeError):
        H.class_coordinates(e(3), 1)


def test_massey_kt4():
    A = ce_differential(KT4)
    res = massey_triple(A, e(1), e(2), e(2))
    assert res.representative == e(2, 3)
    assert not res.vanishes
    H = A.cohomology
    assert not Subspace(H.betti[2], [H.class_coordinates(e(1, 4), 2), H.class_coordinates(e(2, 4), 2)]).contains(
        res.representative_class
    )


def test_massey_undefined():
    with pytest.raises(MasseyUndefinedError):
        massey_triple(ce_differential(KT4), e(1), e(4), e(2))


def test_massey_rejects_non_closed():
    with pytest.raises(GKForgeError):
        massey_triple(ce_differential(KT4), e(3), e(1), e(1))


def test_massey_search():
    assert massey_search(ce_differential(HEIS3)).obstruction_found
    assert not massey_search(ce_differential(LieAlgebra.abelian(4))).obstruction_found


def test_witness_heis3():
    A = ce_differential(HEIS3)
    w = nonformality_witness(A, filtration(HEIS3).compatible_basis)
    assert w.found
    assert w.product == e(1, 2)
    assert A.d(w.primitive) == e(1, 2)
    assert w.primitive == -e(3)
    assert w.volume == e(1, 2, 3)


def test_witness_abelian_not_found():
    A = ce_differential(LieAlgebra.abelian(3))
    w = nonformality_witness(A, [e(1), e(2), e(3)])
    assert not w.found and not w.product_exact


def test_witness_requires_minimal_basis():
    with pytest.raises(GKForgeError):
        nonformality_witness(ce_differential(KT4), [e(3), e(1), e(2), e(4)])


def test_wedge_all():
    assert wedge_all([e(1), e(2), e(3)]) == e(1, 2, 3)
    assert wedge_all([]) == FormElement.one()
