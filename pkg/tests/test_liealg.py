import random

import pytest
from hypothesis import given, strategies as st

from gkforge.errors import CatalogError, DifferentialError, DimensionError, NotNilpotentError
from gkforge.exactlin import C
from gkforge.liealg import (
    LieAlgebra,
    ce_differential,
    ce_images,
    check_jacobi,
    check_minimal_basis,
    filtration,
    lower_central_series,
)

import oracle
from helpers import HEIS3, KT4, algebra, e, random_structure, to_fraction_tensor


def test_heis3_differential():
    assert [f.format() for f in ce_images(HEIS3)] == ["0", "0", "-e1^e2"]


def test_bracket_antisymmetry():
    x, y = (1, 2, 0), (0, 1, 5)
    g = KT4.__class__(3, {(0, 1): {2: 1}})
    assert g.bracket(x, y) == tuple(-c for c in g.bracket(y, x))


def test_from_entries_both_orders():
    g = algebra(3, (1, 2, 3, 1), (2, 1, 3, -1))
    assert g == HEIS3


def test_antisymmetry_violation():
    with pytest.raises(CatalogError, match="antisymmetric"):
        algebra(3, (1, 2, 3, 1), (2, 1, 3, 1))


def test_diagonal_bracket_rejected():
    with pytest.raises(CatalogError):
        algebra(3, (1, 1, 2, 1))


def test_index_out_of_range():
    with pytest.raises(DimensionError):
        algebra(3, (1, 4, 2, 1))


def test_jacobi_failure_reports_triple():
    g = algebra(3, (1, 2, 3, 1), (1, 3, 1, 1))
    rep = check_jacobi(g)
    assert not rep.ok
    (triple, jac), = rep.failures
    assert triple == (0, 1, 2)
    assert jac == (C(0), C(0), C(-1))
    with pytest.raises(DifferentialError):
        ce_differential(g)


def test_lower_central_series():
    cs = lower_central_series(HEIS3)
    assert cs.is_nilpotent and cs.step == 2
    assert [S.dim for S in cs.series] == [3, 1, 0]
    r2 = algebra(2, (1, 2, 2, 1))
    assert not lower_central_series(r2).is_nilpotent


def test_filtration_kt4():
    f = filtration(KT4)
    assert [S.dim for S in f.steps] == [3, 4]
    assert [b.format() for b in f.compatible_basis] == ["e1", "e2", "e4", "e3"]
    assert check_minimal_basis(KT4, f.compatible_basis)
    assert not check_minimal_basis(KT4, [e(3), e(1), e(2), e(4)])


def test_filtration_stalls():
    with pytest.raises(NotNilpotentError) as info:
        filtration(algebra(2, (1, 2, 2, 1)))
    assert info.value.stalled_step == 1


@given(st.integers(0, 10_000), st.integers(3, 5))
def test_jacobi_agrees_with_oracle(seed, dim):
    c = random_structure(random.Random(seed), dim)
    g = LieAlgebra.from_tensor(to_fraction_tensor(c))
    assert check_jacobi(g).ok == oracle.jacobi_ok(c)


@given(st.integers(0, 10_000), st.integers(3, 5))
def test_filtration_iff_nilpotent(seed, dim):
    c = random_structure(random.Random(seed), dim)
    g = LieAlgebra.from_tensor(to_fraction_tensor(c))
    if not check_jacobi(g).ok:
        return
    nilpotent = lower_central_series(g).is_nilpotent
    try:
        f = filtration(g)
        assert nilpotent
        assert check_minimal_basis(g, f.compatible_basis)
    except NotNilpotentError:
        assert not nilpotent
