"""Generalized Kähler pairs, their bigradings and the delta-plus/delta-minus lemma.

For a commuting pair ``(J1, J2)`` the eigenbundle ``Lbar1`` splits as
``(Lbar1 & Lbar2) + (Lbar1 & L2)``.  Exterior powers of the first summand
carry the degree ``p`` and of the second the degree ``q``.  On forms the
pair gives ``U^{p,q} = U^p_{J1} & U^q_{J2}``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Union

from . import dga
from .courant import d_H_matrix, pairing_matrix
from .dga import FormElement, basis_masks, mask_position, popcount
from .errors import NotNilpotentError, StructureError
from .exactlin import ONE, ZERO, C, DirectSum, Matrix, Subspace, image, intersect, is_positive_definite, kernel
from .gcs import Algebroid, GCStructure, Verdict, algebroid, check_gcs, check_hol_trivial, verify_eq3

__all__ = [
    "GKPair",
    "GKReport",
    "gk_metric",
    "check_gk",
    "IntersectionDims",
    "intersection_dims",
    "Bigrading",
    "l1_bigrading",
    "UpqDecomposition",
    "upq_decomposition",
    "DeltaOperators",
    "delta_pm",
    "DDbarReport",
    "ddbar_subspaces",
    "ddbar_lemma_check",
    "violating_complex",
    "Correspondence",
    "gk_correspondence",
    "FormalityReport",
    "formality_algebroid",
]


@dataclass(frozen=True, eq=False)
class GKPair:
    J1: GCStructure
    J2: GCStructure
    name: str = ""

    def __post_init__(self):
        if self.J1.algebra != self.J2.algebra:
            raise StructureError("the two structures live on different algebras")
        if self.J1.twist != self.J2.twist:
            raise StructureError("the two structures must share one twist")

    @property
    def m(self) -> int:
        return self.J1.m


@dataclass(frozen=True)
class GKReport:
    verdicts: tuple[Verdict, ...]

    @property
    def ok(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def __bool__(self) -> bool:
        return self.ok


def gk_metric(J1: GCStructure, J2: GCStructure) -> Matrix:
    """Symmetrized Gram matrix of ``(v, w) -> <J1 J2 v, w>``."""
    A = (J1.J @ J2.J).T @ pairing_matrix(J1.m)
    return (A + A.T).scale(C(1, 0) / 2)


def check_gk(J1: GCStructure, J2: GCStructure) -> GKReport:
    out = []
    for label, S in (("J1", J1), ("J2", J2)):
        rep = check_gcs(S)
        failed = [v.check for v in rep.verdicts if not v.passed]
        out.append(Verdict(f"{label} is a generalized complex structure", rep.ok, "; ".join(failed)))
    shared = J1.algebra == J2.algebra and J1.twist == J2.twist
    out.append(Verdict("J1 and J2 share algebra and twist", shared))
    if not shared:
        out.append(Verdict("J1 J2 = J2 J1", False, "skipped"))
        out.append(Verdict("<J1 J2 v, v> positive definite", False, "skipped"))
        return GKReport(tuple(out))
    out.append(Verdict("J1 J2 = J2 J1", (J1.J @ J2.J - J2.J @ J1.J).is_zero()))
    out.append(Verdict("<J1 J2 v, v> positive definite", is_positive_definite(gk_metric(J1, J2))))
    return GKReport(tuple(out))


def _require_commuting(pair: GKPair) -> None:
    if not (pair.J1.J @ pair.J2.J - pair.J2.J @ pair.J1.J).is_zero():
        raise StructureError("J1 and J2 do not commute")


@dataclass(frozen=True)
class IntersectionDims:
    dim_L1: int
    dim_L1_L2: int
    dim_L1_L2bar: int
    L1_L2: Subspace
    L1_L2bar: Subspace

    @property
    def ok(self) -> bool:
        return self.dim_L1 == 2 * self.dim_L1_L2 == 2 * self.dim_L1_L2bar


def intersection_dims(pair: GKPair) -> IntersectionDims:
    """Check ``L1 = (L1 & L2) + (L1 & L2bar)`` with equal halves."""
    _require_commuting(pair)
    L1 = pair.J1.eigenbundle.L
    L2 = pair.J2.eigenbundle.L
    a, b = intersect(L1, L2), intersect(L1, L2.conj())
    rep = IntersectionDims(L1.dim, a.dim, b.dim, a, b)
    if a.dim + b.dim != L1.dim or (a + b) != L1:
        raise StructureError(f"L1 is not (L1 & L2) + (L1 & L2bar): dims {L1.dim}, {a.dim}, {b.dim}")
    return rep


def _operator_matrix(m: int, fn: Callable[[FormElement], FormElement]) -> Matrix:
    masks = basis_masks(m)
    pos = mask_position(m)
    rows = [[ZERO] * len(masks) for _ in masks]
    for j, mk in enumerate(masks):
        for tm, c in fn(FormElement._wrap({mk: ONE})).terms.items():
            rows[pos[tm]][j] = c
    return Matrix(rows, cols=len(masks))


def _apply(M: Matrix, f: FormElement, m: int) -> FormElement:
    return FormElement.from_vector(M.apply(f.to_vector(m)), m)


@dataclass(frozen=True)
class Bigrading:
    """Bidegree data on ``wedge Lbar1``; generator ``j`` has type p iff ``j < n_p``."""

    algebroid: Algebroid
    n_p: int
    n_q: int
    dims: dict
    del_L: Matrix
    delbar_L: Matrix
    leibniz_ok: bool
    leibniz_trials: int
    squares_zero: bool

    def bidegree(self, mask: int) -> tuple[int, int]:
        pmask = (1 << self.n_p) - 1
        return popcount(mask & pmask), popcount(mask >> self.n_p)


def _random_form(rng: random.Random, m: int, k: int) -> FormElement:
    masks = basis_masks(m, k)
    picks = rng.sample(masks, min(len(masks), rng.randint(1, 3)))
    return FormElement({mk: C(rng.randint(-3, 3), rng.randint(-3, 3)) for mk in picks})


def l1_bigrading(pair: GKPair, seed: int = 0, trials: int = 24) -> Bigrading:
    """Split ``d_L1`` by bidegree into ``del_L1`` (+1, 0) and ``delbar_L1`` (0, +1).

    Raises StructureError if another bidegree component appears.  Both parts
    are tested for the Leibniz rule on ``trials`` random homogeneous pairs.
    """
    dims = intersection_dims(pair)
    # duals of a basis of L1 & L2 lie in Lbar1 & Lbar2 (type p), those of L1 & L2bar in Lbar1 & L2 (type q)
    basis = dims.L1_L2.basis + dims.L1_L2bar.basis
    alg = algebroid(pair.J1, basis)
    n_p, m = dims.dim_L1_L2, pair.m
    pmask = (1 << n_p) - 1

    def bideg(mask):
        return popcount(mask & pmask), popcount(mask >> n_p)

    def component(shift):
        def fn(f):
            out = {}
            for mk, c in f.terms.items():
                p, q = bideg(mk)
                for tm, v in alg.dga.d(FormElement._wrap({mk: c})).terms.items():
                    tp, tq = bideg(tm)
                    if (tp - p, tq - q) == shift:
                        out[tm] = out.get(tm, ZERO) + v
            return FormElement(out)
        return fn

    for gen in range(m):
        p, q = bideg(1 << gen)
        for tm in alg.dga.d(FormElement.generator(gen)).terms:
            tp, tq = bideg(tm)
            if (tp - p, tq - q) not in ((1, 0), (0, 1)):
                raise StructureError(
                    f"J2 restriction not integrable on L1: d of generator l{gen + 1} has a ({tp - p},{tq - q}) component"
                )
    del_f, delbar_f = component((1, 0)), component((0, 1))
    D1, D2 = _operator_matrix(m, del_f), _operator_matrix(m, delbar_f)
    if D1 + D2 != alg.dga.full_matrix:
        raise StructureError("J2 restriction not integrable on L1: d_L1 has other bidegree components")
    rng = random.Random(seed)
    leibniz = True
    for _ in range(trials):
        ka, kb = rng.randint(0, m), rng.randint(0, m)
        a, b = _random_form(rng, m, ka), _random_form(rng, m, kb)
        sign = ONE if ka % 2 == 0 else -ONE
        for fn in (del_f, delbar_f):
            if fn(a.wedge(b)) != fn(a).wedge(b) + a.wedge(fn(b)).scale(sign):
                leibniz = False
    zero = Matrix.zeros(D1.rows, D1.cols)
    squares = (D1 @ D1) == zero and (D2 @ D2) == zero and (D1 @ D2 + D2 @ D1) == zero
    counts: dict = {}
    for mk in basis_masks(m):
        counts[bideg(mk)] = counts.get(bideg(mk), 0) + 1
    return Bigrading(alg, n_p, m - n_p, counts, D1, D2, leibniz, trials, squares)


@dataclass(frozen=True)
class UpqDecomposition:
    spaces: dict
    direct_sum: DirectSum
    parts: dict

    @property
    def dims(self) -> dict:
        return {k: S.dim for k, S in self.spaces.items()}


_CORNERS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def upq_decomposition(pair: GKPair) -> UpqDecomposition:
    """``U^{p,q} = U^p_J1 & U^q_J2`` and the split of ``d_H`` into its four corners."""
    _require_commuting(pair)
    m = pair.m
    lv1, lv2 = pair.J1.decomposition.levels, pair.J2.decomposition.levels
    spaces = {}
    for p in sorted(lv1, reverse=True):
        for q in sorted(lv2, reverse=True):
            S = intersect(lv1[p], lv2[q])
            if S.dim:
                spaces[(p, q)] = S
    try:
        ds = DirectSum(2 ** m, spaces)
    except Exception as exc:
        raise StructureError(f"U^(p,q) do not form a direct sum: {exc}") from None
    parts = ds.split_operator(d_H_matrix(pair.J1.algebra, pair.J1.twist), lambda s, t: (t[0] - s[0], t[1] - s[1]))
    stray = sorted(k for k in parts if k not in _CORNERS)
    if stray:
        raise StructureError(f"d_H has components outside the four corners: shifts {stray}")
    return UpqDecomposition(spaces, ds, parts)


@dataclass(frozen=True)
class DeltaOperators:
    plus: Matrix
    minus: Matrix
    delbar: Matrix

    @property
    def sums_to_delbar(self) -> bool:
        return self.plus + self.minus == self.delbar


def delta_pm(pair: GKPair, upq: UpqDecomposition | None = None) -> DeltaOperators:
    """``delta_+ : U^{p,q} -> U^{p-1,q+1}`` and ``delta_- : U^{p,q} -> U^{p-1,q-1}``."""
    upq = upq or upq_decomposition(pair)
    N = 2 ** pair.m
    zero = Matrix.zeros(N, N)
    return DeltaOperators(
        upq.parts.get((-1, 1), zero),
        upq.parts.get((-1, -1), zero),
        pair.J1.operators.delbar_op,
    )


@dataclass(frozen=True)
class DDbarReport:
    im_plus_ker_minus: Subspace
    im_minus_ker_plus: Subspace
    im_plus_minus: Subspace

    @property
    def holds(self) -> bool:
        return self.im_plus_ker_minus == self.im_minus_ker_plus == self.im_plus_minus

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.im_plus_ker_minus.dim, self.im_minus_ker_plus.dim, self.im_plus_minus.dim)


def ddbar_subspaces(plus: Matrix, minus: Matrix) -> DDbarReport:
    """The three subspaces compared by the lemma, for any pair of square operators."""
    return DDbarReport(
        intersect(image(plus), kernel(minus)),
        intersect(image(minus), kernel(plus)),
        image(plus @ minus),
    )


def ddbar_lemma_check(pair: GKPair) -> DDbarReport:
    ops = delta_pm(pair)
    return ddbar_subspaces(ops.plus, ops.minus)


def violating_complex() -> tuple[Matrix, Matrix]:
    """Two-dimensional complex with ``delta_+ x = y`` and ``delta_- = 0``; the lemma fails."""
    plus = Matrix([[0, 0], [1, 0]])
    return plus, Matrix.zeros(2, 2)


@dataclass(frozen=True)
class Correspondence:
    sum_identity: bool
    del_to_plus: bool
    del_to_minus: bool
    checked: int

    @property
    def pairing(self) -> str | None:
        if self.del_to_plus and self.del_to_minus:
            return "both (all operators vanish)"
        if self.del_to_plus:
            return "del_L1 <-> delta_plus, delbar_L1 <-> delta_minus"
        if self.del_to_minus:
            return "del_L1 <-> delta_minus, delbar_L1 <-> delta_plus"
        return None

    @property
    def ok(self) -> bool:
        return self.sum_identity and self.pairing is not None


def gk_correspondence(pair: GKPair, seed: int = 0) -> Correspondence:
    """Transport ``del_L1``, ``delbar_L1`` through ``alpha -> alpha . rho1`` and match them with delta_+-."""
    big = l1_bigrading(pair, seed=seed)
    alg = big.algebroid
    if not verify_eq3(pair.J1, alg).ok:
        raise StructureError("the Clifford transport identity fails for J1")
    ops = delta_pm(pair)
    m = pair.m
    rho = pair.J1.spinor.rho
    sum_ok = to_plus = to_minus = True
    masks = basis_masks(m)
    for mk in masks:
        alpha = FormElement._wrap({mk: ONE})
        image_ = alg.act(alpha, rho)
        dp = _apply(ops.plus, image_, m)
        dm = _apply(ops.minus, image_, m)
        a = alg.act(_apply(big.del_L, alpha, m), rho)
        b = alg.act(_apply(big.delbar_L, alpha, m), rho)
        sum_ok &= a + b == _apply(ops.delbar, image_, m)
        to_plus &= a == dp and b == dm
        to_minus &= a == dm and b == dp
    return Correspondence(sum_ok, to_plus, to_minus, len(masks))


@dataclass
class FormalityReport:
    nilpotent: bool
    filtration: dga.Filtration | None
    witness: dga.WitnessReport | None
    massey: dga.MasseySearch
    betti: tuple[int, ...]
    notes: list[str] = field(default_factory=list)

    @property
    def nonformal(self) -> bool:
        return bool(self.witness and self.witness.found) or self.massey.obstruction_found

    @property
    def verdict(self) -> str:
        if self.nonformal:
            kinds = []
            if self.witness and self.witness.found:
                kinds.append("witness")
            if self.massey.obstruction_found:
                kinds.append("Massey")
            return f"non-formal ({'/'.join(kinds)} certificate)"
        return f"no obstruction found up to degree {self.massey.max_degree}"


def formality_algebroid(target: Union[GKPair, GCStructure], max_degree: int | None = None) -> FormalityReport:
    """Search ``(wedge Lbar1, d_L1)`` for obstructions to formality.

    Runs the nilpotent filtration, the volume-form witness on its compatible
    basis when the filtration exists, and the Massey triple enumeration.
    """
    S = target.J1 if isinstance(target, GKPair) else target
    if not check_hol_trivial(S):
        raise StructureError("canonical generator is not d_H-closed")
    A = algebroid(S).dga
    notes = []
    try:
        filt = dga.nilpotent_filtration(A)
        witness = dga.nonformality_witness(A, filt.compatible_basis)
        nilpotent = True
    except NotNilpotentError as exc:
        filt, witness, nilpotent = None, None, False
        notes.append(str(exc))
    massey = dga.massey_search(A, max_degree)
    return FormalityReport(nilpotent, filt, witness, massey, A.cohomology.betti, notes)
