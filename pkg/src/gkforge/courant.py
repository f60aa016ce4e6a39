"""The double ``g + g*``: pairing, twisted Courant bracket, Clifford action, ``d_H``.

Double coordinates are ordered ``(e_1..e_m, e^1..e^m)``: vector part first,
then covector part.  Forms on ``g`` are :class:`~gkforge.dga.FormElement` on
``m`` generators, the j-th generator being ``e^j``.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .dga import FormElement, basis_masks, mask_position
from .errors import DimensionError, TwistNotClosedError
from .exactlin import ONE, ZERO, C, Matrix, as_c, as_vector
from .liealg import LieAlgebra, ce_differential, check_jacobi, JacobiReport

__all__ = [
    "pairing",
    "pairing_matrix",
    "check_twist",
    "double_algebra",
    "courant_bracket",
    "check_bracket_jacobi",
    "d_H",
    "d_H_matrix",
    "clifford_act",
    "clifford_matrix",
    "vector",
    "covector",
]

HALF = C(Fraction(1, 2))


def vector(m: int, i: int, coeff=1) -> tuple[C, ...]:
    """``coeff * e_i`` in the double of an m-dimensional algebra."""
    v = [ZERO] * (2 * m)
    v[i] = as_c(coeff)
    return tuple(v)


def covector(m: int, i: int, coeff=1) -> tuple[C, ...]:
    """``coeff * e^i`` in the double."""
    v = [ZERO] * (2 * m)
    v[m + i] = as_c(coeff)
    return tuple(v)


def _split(v: Sequence, m: int | None = None) -> tuple[tuple[C, ...], tuple[C, ...]]:
    v = as_vector(v)
    if len(v) % 2:
        raise DimensionError("double elements have even length")
    if m is not None and len(v) != 2 * m:
        raise DimensionError(f"double element of length {len(v)} for dimension {m}")
    h = len(v) // 2
    return v[:h], v[h:]


def pairing(v: Sequence, w: Sequence) -> C:
    """``<X + xi, Y + eta> = (eta(X) + xi(Y)) / 2`` extended complex-bilinearly."""
    X, xi = _split(v)
    Y, eta = _split(w)
    s = ZERO
    for a, b in zip(eta, X):
        if a and b:
            s = s + a * b
    for a, b in zip(xi, Y):
        if a and b:
            s = s + a * b
    return s * HALF


@lru_cache(maxsize=None)
def pairing_matrix(m: int) -> Matrix:
    """Gram matrix of the pairing: ``[[0, I/2], [I/2, 0]]``."""
    rows = [[ZERO] * (2 * m) for _ in range(2 * m)]
    for i in range(m):
        rows[i][m + i] = HALF
        rows[m + i][i] = HALF
    return Matrix(rows)


def check_twist(g: LieAlgebra, H: FormElement) -> None:
    """Raise TwistNotClosedError unless H is a closed 3-form (H = 0 allowed)."""
    if not H:
        return
    if H.degrees() != {3}:
        raise TwistNotClosedError("twist must be a 3-form")
    if H.support() >> g.dim:
        raise DimensionError("twist uses indices beyond the algebra dimension")
    dH = ce_differential(g).d(H)
    if dH:
        raise TwistNotClosedError(f"dH = {dH.format()} != 0")


def _twist_term(H: FormElement, i: int, j: int) -> FormElement:
    # contraction order chosen so the bracket is the derived bracket of d + H^ (see tests)
    return H.interior(j).interior(i)


@lru_cache(maxsize=256)
def double_algebra(g: LieAlgebra, H: FormElement = FormElement()) -> LieAlgebra:
    """``g + g*`` with the twisted Courant bracket as a 2m-dimensional Lie algebra.

    On invariant elements ``L_X eta = i_X d eta`` (the function term of the
    manifold formula is constant and drops out), so
    ``[e_i, e^k] = -sum_j c^k_ij e^j`` and ``[e^k, e^l] = 0``.
    """
    check_twist(g, H)
    m = g.dim
    table: dict[tuple[int, int], dict[int, C]] = {}
    for i, j in itertools.combinations(range(m), 2):
        row = dict(enumerate(g.bracket_basis(i, j)))
        for mask, c in _twist_term(H, i, j).terms.items():
            l = mask.bit_length() - 1
            row[m + l] = row.get(m + l, ZERO) + c
        table[(i, j)] = row
    for i in range(m):
        for k in range(m):
            row = {}
            for j in range(m):
                c = g.structure_constant(k, i, j)
                if c:
                    row[m + j] = -c
            if row:
                table[(i, m + k)] = row
    return LieAlgebra(2 * m, table)


def courant_bracket(v: Sequence, w: Sequence, H: FormElement, g: LieAlgebra) -> tuple[C, ...]:
    """Twisted Courant bracket of two elements of the (complexified) double."""
    _split(v, g.dim)
    _split(w, g.dim)
    return double_algebra(g, H).bracket(v, w)


def check_bracket_jacobi(g: LieAlgebra, H: FormElement) -> JacobiReport:
    """Jacobi identity for the twisted bracket on all basis triples of the double."""
    return check_jacobi(double_algebra(g, H))


def clifford_act(v: Sequence, rho: FormElement) -> FormElement:
    """``(X + xi) . rho = i_X rho + xi ^ rho``."""
    X, xi = _split(v)
    out = FormElement()
    for i, a in enumerate(X):
        if a:
            out = out + rho.interior(i).scale(a)
    one_form = FormElement({1 << i: b for i, b in enumerate(xi) if b})
    if one_form:
        out = out + one_form.wedge(rho)
    return out


def clifford_matrix(v: Sequence, m: int) -> Matrix:
    """Clifford action of ``v`` on the full form space (graded-lex basis, size 2^m)."""
    _split(v, m)
    masks = basis_masks(m)
    pos = mask_position(m)
    N = len(masks)
    rows = [[ZERO] * N for _ in range(N)]
    for j, mk in enumerate(masks):
        img = clifford_act(v, FormElement._wrap({mk: ONE}))
        for tm, c in img.terms.items():
            rows[pos[tm]][j] = c
    return Matrix(rows, cols=N)


def d_H(g: LieAlgebra, H: FormElement, rho: FormElement) -> FormElement:
    """``d rho + H ^ rho``."""
    check_twist(g, H)
    out = ce_differential(g).d(rho)
    if H:
        out = out + H.wedge(rho)
    return out


@lru_cache(maxsize=64)
def d_H_matrix(g: LieAlgebra, H: FormElement = FormElement()) -> Matrix:
    """``d_H`` on the full complexified form space (graded-lex basis)."""
    check_twist(g, H)
    m = g.dim
    D = ce_differential(g).full_matrix
    if not H:
        return D
    masks = basis_masks(m)
    pos = mask_position(m)
    rows = [list(r) for r in D.data]
    for j, mk in enumerate(masks):
        for tm, c in H.wedge(FormElement._wrap({mk: ONE})).terms.items():
            rows[pos[tm]][j] = rows[pos[tm]][j] + c
    return Matrix(rows, cols=len(masks))
