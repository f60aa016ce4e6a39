import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gkforge.courant import (
    check_bracket_jacobi,
    check_twist,
    clifford_act,
    clifford_matrix,
    courant_bracket,
    covector,
    d_H,
    d_H_matrix,
    pairing,
    pairing_matrix,
    vector,
)
from gkforge.dga import FormElement
from gkforge.errors import DimensionError, TwistNotClosedError
from gkforge.exactlin import C, Matrix
from gkforge.liealg import LieAlgebra

from helpers import KT4, algebra, e

M = 4
elems = st.lists(st.integers(-2, 2), min_size=2 * M, max_size=2 * M).map(lambda v: tuple(C(x) for x in v))
forms4 = st.lists(st.integers(-2, 2), min_size=16, max_size=16).map(lambda v: FormElement.from_vector([C(x) for x in v], M))


def test_pairing_values():
    assert pairing(vector(M, 0), covector(M, 0)) == C(Fraction(1, 2))
    assert pairing(vector(M, 0), vector(M, 1)) == 0
    assert pairing(covector(M, 0), covector(M, 0)) == 0
    assert pairing_matrix(M) == pairing_matrix(M).T


@given(elems, forms4)
def test_clifford_square(v, rho):
    twice = clifford_act(v, clifford_act(v, rho))
    assert twice == rho.scale(pairing(v, v))


@given(elems, elems)
def test_clifford_anticommutator(u, w):
    A, B = clifford_matrix(u, M), clifford_matrix(w, M)
    assert A @ B + B @ A == Matrix.identity(16).scale(pairing(u, w) * 2)


def test_mixed_bracket_kt4():
    # [e1, e^3] = -c^3_{1j} e^j = -e^2
    assert courant_bracket(vector(M, 0), covector(M, 2), FormElement(), KT4) == covector(M, 1, -1)
    assert courant_bracket(vector(M, 0), vector(M, 1), FormElement(), KT4) == vector(M, 2)
    assert not any(courant_bracket(covector(M, 0), covector(M, 2), FormElement(), KT4))


def test_twisted_bracket_of_vectors():
    H = e(1, 2, 4)
    br = courant_bracket(vector(M, 0), vector(M, 1), H, KT4)
    # the twist contributes H(e2, e1, .) = -e^4
    assert br == tuple(a + b for a, b in zip(vector(M, 2), covector(M, 3, -1)))


def test_dH_basics():
    H = e(1, 2, 4)
    assert d_H(KT4, H, FormElement.one()) == H
    D = d_H_matrix(KT4, H)
    assert (D @ D).is_zero()


def test_check_twist():
    check_twist(KT4, e(1, 2, 4))
    with pytest.raises(TwistNotClosedError):
        check_twist(KT4, e(3, 4, 1) + e(1, 2))
    g5 = algebra(5, (1, 2, 3, 1), (1, 2, 5, 1))
    with pytest.raises(TwistNotClosedError):
        check_twist(g5, e(3, 4, 5))
    with pytest.raises(DimensionError):
        check_twist(KT4, e(1, 2, 5))


@pytest.mark.parametrize("H", [FormElement(), e(1, 2, 4), e(1, 2, 3) - e(1, 2, 4, c=3)])
def test_derived_bracket(H):
    """The bracket is the derived bracket of d_H: [[d_H, a.], b.] = [[a, b]]."""
    D = d_H_matrix(KT4, H)
    basis = [vector(M, i) for i in range(M)] + [covector(M, i) for i in range(M)]
    cl = [clifford_matrix(v, M) for v in basis]
    for (a, A), (b, B) in itertools.product(zip(basis, cl), repeat=2):
        inner = D @ A + A @ D
        derived = inner @ B - B @ inner
        assert derived == clifford_matrix(courant_bracket(a, b, H, KT4), M)


@pytest.mark.parametrize("H", [FormElement(), e(1, 2, 4)])
def test_bracket_jacobi_kt4(H):
    assert check_bracket_jacobi(KT4, H).ok


def test_abelian_bracket_vanishes():
    g = LieAlgebra.abelian(4)
    for a, b in itertools.combinations(range(8), 2):
        u = vector(M, a) if a < M else covector(M, a - M)
        w = vector(M, b) if b < M else covector(M, b - M)
        assert not any(courant_bracket(u, w, FormElement(), g))
