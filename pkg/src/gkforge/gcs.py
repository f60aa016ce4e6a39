"""Generalized complex structures on the double of a Lie algebra.

A structure is a real ``2m x 2m`` matrix ``J`` acting on double coordinates
``(X, xi)``.  Its i-eigenspace ``L`` annihilates a pure spinor ``rho``; Clifford
multiplication by ``wedge^j Lbar`` on ``rho`` produces the levels
``U^(n-j)`` of the form decomposition, and ``d_H`` splits across adjacent
levels as ``del + delbar`` when ``L`` is Courant involutive.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import comb, factorial
from typing import Sequence

from .courant import clifford_act, clifford_matrix, check_twist, courant_bracket, d_H_matrix, pairing, pairing_matrix
from .dga import DGAPresentation, FormElement, basis_masks, mask_indices
from .errors import GKForgeError, StructureError, TwistNotClosedError
from .exactlin import I, ONE, ZERO, C, DirectSum, Matrix, Subspace, as_c, dot, intersect, kernel
from .liealg import LieAlgebra, ce_differential

__all__ = [
    "GCStructure",
    "complex_gcs",
    "symplectic_gcs",
    "b_transform",
    "structure_from_eigenspace",
    "two_form_matrix",
    "Verdict",
    "GCSReport",
    "check_gcs",
    "Eigenbundle",
    "i_eigenspace",
    "type_of",
    "is_abelian_gcs",
    "SpinorLine",
    "canonical_line",
    "spinor_from_data",
    "check_hol_trivial",
    "UkDecomposition",
    "uk_decomposition",
    "DelDelbar",
    "del_delbar",
    "Algebroid",
    "algebroid",
    "Eq3Report",
    "verify_eq3",
]


@dataclass(frozen=True)
class Verdict:
    check: str
    passed: bool
    details: str = ""


@dataclass(frozen=True, eq=False)
class GCStructure:
    """A candidate generalized complex structure ``J`` on ``g + g*`` with twist ``H``."""

    algebra: LieAlgebra
    J: Matrix
    twist: FormElement = field(default_factory=FormElement)
    name: str = ""

    def __post_init__(self):
        m = self.algebra.dim
        if (self.J.rows, self.J.cols) != (2 * m, 2 * m):
            raise StructureError(f"J must be {2 * m}x{2 * m}, got {self.J.rows}x{self.J.cols}")

    @property
    def m(self) -> int:
        return self.algebra.dim

    @property
    def n(self) -> int:
        return self.algebra.dim // 2

    @cached_property
    def eigenbundle(self) -> "Eigenbundle":
        return i_eigenspace(self)

    @cached_property
    def spinor(self) -> "SpinorLine":
        return canonical_line(self)

    @cached_property
    def decomposition(self) -> "UkDecomposition":
        return uk_decomposition(self)

    @cached_property
    def operators(self) -> "DelDelbar":
        return del_delbar(self)


def two_form_matrix(omega: FormElement, m: int) -> Matrix:
    """Matrix of ``X -> i_X omega`` from vectors to covectors."""
    rows = [[ZERO] * m for _ in range(m)]
    for i in range(m):
        for mask, c in omega.interior(i).terms.items():
            rows[mask.bit_length() - 1][i] = c
    return Matrix(rows)


def complex_gcs(g: LieAlgebra, J0: Matrix, H: FormElement = FormElement(), name: str = "") -> GCStructure:
    """``[[-J0, 0], [0, J0^T]]``, whose i-eigenspace is ``T^{0,1} + T*^{1,0}``."""
    m = g.dim
    Z = Matrix.zeros(m, m)
    return GCStructure(g, Matrix.block([[-J0, Z], [Z, J0.T]]), H, name)


def symplectic_gcs(g: LieAlgebra, omega: FormElement, H: FormElement = FormElement(), name: str = "") -> GCStructure:
    """``[[0, -w^-1], [w, 0]]`` with ``w(X) = i_X omega``; i-eigenspace ``{X - i w(X)}``."""
    W = two_form_matrix(omega, g.dim)
    return GCStructure(g, Matrix.block([[Matrix.zeros(g.dim, g.dim), -W.inverse()], [W, Matrix.zeros(g.dim, g.dim)]]), H, name)


def b_transform(S: GCStructure, B: FormElement, name: str = "") -> GCStructure:
    """Conjugate by the shear ``X + xi -> X + xi + i_X B``; the twist becomes ``H + dB``."""
    m = S.m
    Bm = two_form_matrix(B, m)
    E = Matrix.block([[Matrix.identity(m), Matrix.zeros(m, m)], [Bm, Matrix.identity(m)]])
    Einv = Matrix.block([[Matrix.identity(m), Matrix.zeros(m, m)], [-Bm, Matrix.identity(m)]])
    H = S.twist + ce_differential(S.algebra).d(B)
    return GCStructure(S.algebra, E @ S.J @ Einv, H, name or S.name)


def structure_from_eigenspace(g: LieAlgebra, L_basis: Sequence[Sequence], H: FormElement = FormElement(), name: str = "") -> GCStructure:
    """The real ``J`` acting as ``+i`` on ``span(L_basis)`` and ``-i`` on its conjugate."""
    m = g.dim
    vecs = [tuple(as_c(x) for x in v) for v in L_basis]
    cols = vecs + [tuple(x.conj() for x in v) for v in vecs]
    P = Matrix.from_columns(cols, 2 * m)
    D = Matrix([[(I if i < m else -I) if i == j else ZERO for j in range(2 * m)] for i in range(2 * m)])
    J = P @ D @ P.inverse()
    if not J.is_real():
        raise StructureError("eigenspace data does not produce a real J")
    return GCStructure(g, J, H, name)


@dataclass(frozen=True)
class GCSReport:
    verdicts: tuple[Verdict, ...]

    @property
    def ok(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def __bool__(self) -> bool:
        return self.ok


def check_gcs(S: GCStructure) -> GCSReport:
    """Separate verdicts for each requirement of a generalized complex structure."""
    m = S.m
    out = []
    out.append(Verdict("even dimension", m % 2 == 0, f"dim g = {m}"))
    out.append(Verdict("J is real", S.J.is_real()))
    sq = S.J @ S.J
    out.append(Verdict("J^2 = -1", sq == -Matrix.identity(2 * m)))
    G = pairing_matrix(m)
    out.append(Verdict("J preserves the natural pairing", S.J.T @ G @ S.J == G))
    try:
        check_twist(S.algebra, S.twist)
        twist_ok, detail = True, ""
    except TwistNotClosedError as exc:
        twist_ok, detail = False, str(exc)
    out.append(Verdict("twist H is closed", twist_ok, detail))
    if all(v.passed for v in out):
        L = kernel(S.J - Matrix.identity(2 * m).scale(I))
        bad = _involutivity_failure(S, L)
        out.append(Verdict("i-eigenspace closed under the Courant bracket", bad is None, bad or ""))
    else:
        out.append(Verdict("i-eigenspace closed under the Courant bracket", False, "skipped: earlier checks failed"))
    return GCSReport(tuple(out))


def _involutivity_failure(S: GCStructure, L: Subspace) -> str | None:
    for (a, u), (b, v) in itertools.combinations(enumerate(L.basis), 2):
        br = courant_bracket(u, v, S.twist, S.algebra)
        if not L.contains(br):
            return f"bracket of L basis vectors {a + 1} and {b + 1} leaves L"
    return None


@dataclass(frozen=True)
class Eigenbundle:
    L: Subspace
    Lbar: Subspace
    m: int

    def anchor(self, v: Sequence[C]) -> tuple[C, ...]:
        return tuple(v[: self.m])


def i_eigenspace(S: GCStructure) -> Eigenbundle:
    m = S.m
    L = kernel(S.J - Matrix.identity(2 * m).scale(I))
    if L.dim != m:
        raise StructureError(f"i-eigenspace has dimension {L.dim}, expected {m}")
    for u, v in itertools.combinations_with_replacement(L.basis, 2):
        if pairing(u, v):
            raise StructureError("i-eigenspace is not isotropic")
    Lbar = L.conj()
    if intersect(L, Lbar).dim:
        raise StructureError("L and its conjugate intersect")
    return Eigenbundle(L, Lbar, m)


def type_of(S: GCStructure) -> int:
    """``dim ker(pi: L -> g_C)``."""
    E = S.eigenbundle
    return E.L.dim - Subspace(S.m, (E.anchor(v) for v in E.L.basis)).dim


def is_abelian_gcs(S: GCStructure) -> bool:
    L = S.eigenbundle.L
    return all(not any(courant_bracket(u, v, S.twist, S.algebra)) for u, v in itertools.combinations(L.basis, 2))


@dataclass(frozen=True)
class SpinorLine:
    rho: FormElement
    m: int

    @property
    def vector(self) -> tuple[C, ...]:
        return self.rho.to_vector(self.m)


def canonical_line(S: GCStructure) -> SpinorLine:
    """The line of forms annihilated by every element of ``L``.

    The generator is scaled so that its first nonzero coefficient in the
    graded-lex monomial order equals 1.
    """
    m = S.m
    rows: list[tuple[C, ...]] = []
    for v in S.eigenbundle.L.basis:
        rows.extend(clifford_matrix(v, m).data)
    K = kernel(Matrix(rows, cols=2 ** m))
    if K.dim != 1:
        raise StructureError(f"annihilator of L has dimension {K.dim}, expected 1")
    return SpinorLine(FormElement.from_vector(K.basis[0], m), m)


def exp_form(beta: FormElement) -> FormElement:
    """Finite exponential of an even form without constant term."""
    out = FormElement.one()
    power = FormElement.one()
    k = 1
    while True:
        power = power.wedge(beta)
        if not power:
            return out
        out = out + power.scale(C(1) / factorial(k))
        k += 1


def _is_decomposable(Omega: FormElement, m: int) -> bool:
    k = Omega.degree
    if k is None:
        return False
    if k == 0:
        return True
    ann = [FormElement.generator(i).wedge(Omega).to_vector(m, k + 1) for i in range(m)] if k < m else []
    # dim of {xi : xi ^ Omega = 0} must equal k
    if k == m:
        return True
    A = Matrix.from_columns(ann, comb(m, k + 1))
    return kernel(A).dim == k


def spinor_from_data(B: FormElement, omega: FormElement, Omega: FormElement, m: int) -> tuple[FormElement, bool]:
    """``rho = exp(B + i omega) ^ Omega`` and whether ``Omega ^ conj(Omega) ^ omega^(n-k) != 0``."""
    if m % 2:
        raise GKForgeError("pure spinors of this form need an even-dimensional algebra")
    if not Omega or not _is_decomposable(Omega, m):
        raise GKForgeError("Omega must be a nonzero decomposable form")
    for name, f in (("B", B), ("omega", omega)):
        if f and (f.degrees() != {2} or not f.is_real()):
            raise GKForgeError(f"{name} must be a real 2-form")
    n, k = m // 2, Omega.degree
    rho = exp_form(B + omega.scale(I)).wedge(Omega)
    if k > n:
        return rho, False
    top = Omega.wedge(Omega.conj())
    for _ in range(n - k):
        top = top.wedge(omega)
    return rho, bool(top)


def check_hol_trivial(S: GCStructure) -> bool:
    """Whether the canonical generator is ``d_H``-closed."""
    rho = S.spinor.vector
    return not any(d_H_matrix(S.algebra, S.twist).apply(rho))


@dataclass(frozen=True)
class UkDecomposition:
    n: int
    levels: dict
    direct_sum: DirectSum

    @property
    def dims(self) -> dict:
        return {k: S.dim for k, S in self.levels.items()}


def _clifford_products(vectors: Sequence[Sequence[C]], j: int, rho: FormElement) -> list[FormElement]:
    out = []
    for combo in itertools.combinations(vectors, j):
        f = rho
        for v in reversed(combo):
            f = clifford_act(v, f)
        out.append(f)
    return out


def uk_decomposition(S: GCStructure) -> UkDecomposition:
    """``U^(n-j) = wedge^j Lbar . rho`` for ``j = 0..2n``; checks the sum is direct."""
    m, n = S.m, S.n
    if m % 2:
        raise StructureError("odd-dimensional algebra")
    rho = S.spinor.rho
    Lbar = S.eigenbundle.Lbar.basis
    levels = {}
    for j in range(m + 1):
        forms = _clifford_products(Lbar, j, rho)
        levels[n - j] = Subspace(2 ** m, (f.to_vector(m) for f in forms))
    for k, U in levels.items():
        if U.dim != comb(m, n - k):
            raise StructureError(f"dim U^{k} = {U.dim}, expected {comb(m, n - k)}")
    try:
        ds = DirectSum(2 ** m, levels)
    except GKForgeError as exc:
        raise StructureError(f"U^k do not form a direct sum: {exc}") from None
    return UkDecomposition(n, levels, ds)


@dataclass(frozen=True)
class DelDelbar:
    d_H: Matrix
    del_op: Matrix
    delbar_op: Matrix
    residual: Matrix

    @property
    def integrable(self) -> bool:
        return self.residual.is_zero()


def del_delbar(S: GCStructure) -> DelDelbar:
    """Split ``d_H`` on the levels into the ``+1`` part (del) and the ``-1`` part (delbar).

    Any other component is collected in ``residual``; raises StructureError
    naming an offending basis form if it is nonzero.
    """
    D = d_H_matrix(S.algebra, S.twist)
    parts = S.decomposition.direct_sum.split_operator(D, lambda src, dst: dst - src)
    N = D.rows
    zero = Matrix.zeros(N, N)
    residual = zero
    for shift, op in parts.items():
        if shift not in (1, -1):
            residual = residual + op
    if not residual.is_zero():
        col = next(j for j in range(N) if any(residual.column(j)))
        bad = FormElement.from_vector(tuple(ONE if t == col else ZERO for t in range(N)), S.m)
        raise StructureError(f"not integrable: d_H of {bad.format()} has components outside U^(k+1) + U^(k-1)")
    return DelDelbar(D, parts.get(1, zero), parts.get(-1, zero), residual)


@dataclass(frozen=True)
class Algebroid:
    """``L`` as a complex Lie algebra and the DGA ``(wedge Lbar, d_L)``.

    ``basis`` spans ``L``; ``dual`` spans ``Lbar`` with ``2 <dual_j, basis_k> = delta_jk``,
    and generator ``j`` of ``dga`` stands for ``dual[j]``.
    """

    basis: tuple[tuple[C, ...], ...]
    dual: tuple[tuple[C, ...], ...]
    lie: LieAlgebra
    dga: DGAPresentation

    def act(self, alpha: FormElement, rho: FormElement) -> FormElement:
        """Clifford action of ``alpha`` in ``wedge Lbar`` on a form."""
        out = FormElement()
        for mask, c in alpha.terms.items():
            f = rho
            for j in reversed(mask_indices(mask)):
                f = clifford_act(self.dual[j], f)
            out = out + f.scale(c)
        return out


def algebroid(S: GCStructure, basis: Sequence[Sequence[C]] | None = None) -> Algebroid:
    """Build ``d_L`` as the Chevalley–Eilenberg differential of ``(L, Courant bracket)``."""
    m = S.m
    L = S.eigenbundle.L
    basis = tuple(tuple(as_c(x) for x in v) for v in (basis if basis is not None else L.basis))
    if len(basis) != m or Subspace(2 * m, basis) != L:
        raise StructureError("given vectors are not a basis of L")
    Pm = Matrix.from_columns(basis, 2 * m)
    # coordinates of w in L: solve Pm c = w via the pseudo-inverse on pivot rows
    coords_of = _coordinate_solver(Pm)
    table: dict[tuple[int, int], dict[int, C]] = {}
    for i, j in itertools.combinations(range(m), 2):
        br = courant_bracket(basis[i], basis[j], S.twist, S.algebra)
        table[(i, j)] = dict(enumerate(coords_of(br)))
    lie = LieAlgebra(m, table)
    conj_basis = [tuple(x.conj() for x in v) for v in basis]
    G = pairing_matrix(m).scale(2)
    # P[a][k] = 2 <conj_a, basis_k>; dual_j = sum_a (P^-1)[j][a] conj_a
    P = Matrix([[dot(ca, G.apply(b)) for b in basis] for ca in conj_basis])
    Pinv = P.inverse()
    dual = []
    for j in range(m):
        v = [ZERO] * (2 * m)
        for a in range(m):
            c = Pinv[j, a]
            if c:
                for t, x in enumerate(conj_basis[a]):
                    if x:
                        v[t] = v[t] + c * x
        dual.append(tuple(v))
    return Algebroid(basis, tuple(dual), lie, ce_differential(lie))


def _coordinate_solver(Pm: Matrix):
    from .exactlin import solve

    def coords(w):
        x = solve(Pm, w)
        if x is None:
            raise StructureError("Courant bracket of L elements leaves L")
        return x

    return coords


@dataclass(frozen=True)
class Eq3Report:
    ok: bool
    checked: int
    offending: tuple[str, ...]


def verify_eq3(S: GCStructure, alg: Algebroid | None = None) -> Eq3Report:
    """Check ``delbar(alpha . rho) = (d_L alpha) . rho`` for every basis monomial alpha."""
    if not check_hol_trivial(S):
        raise StructureError("canonical generator is not d_H-closed")
    alg = alg or algebroid(S)
    m = S.m
    rho = S.spinor.rho
    delbar = S.operators.delbar_op
    bad = []
    masks = basis_masks(m)
    for mask in masks:
        alpha = FormElement._wrap({mask: ONE})
        lhs = delbar.apply(alg.act(alpha, rho).to_vector(m))
        rhs = alg.act(alg.dga.d(alpha), rho).to_vector(m)
        if lhs != rhs:
            bad.append(alpha.format("l"))
    return Eq3Report(not bad, len(masks), tuple(bad))
