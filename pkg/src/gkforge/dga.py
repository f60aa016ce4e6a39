"""Exterior differential graded algebras on degree-one generators.

Monomials ``g^{i1} ^ ... ^ g^{ik}`` (``i1 < ... < ik``) are encoded as bitmasks.
Whenever forms are turned into coordinate vectors the basis is graded-lex:
first by degree, then lexicographically by the sorted index tuple.  Within
a single degree the same order is used.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

from .errors import DifferentialError, DimensionError, GKForgeError, MasseyUndefinedError, NotNilpotentError
from .exactlin import ONE, ZERO, C, Matrix, Subspace, as_c, kernel, image, preimage, solve

__all__ = [
    "FormElement",
    "wedge",
    "basis_masks",
    "DGAPresentation",
    "extend_differential",
    "CohomologyData",
    "cohomology",
    "MasseyResult",
    "massey_triple",
    "MasseySearch",
    "massey_search",
    "Filtration",
    "nilpotent_filtration",
    "check_minimal_basis",
    "WitnessReport",
    "nonformality_witness",
]


def popcount(x: int) -> int:
    return bin(x).count("1")


def mask_indices(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def indices_mask(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def wedge_sign(a: int, b: int) -> int:
    """Sign of ``mono(a) ^ mono(b)`` relative to ``mono(a|b)``; 0 if they overlap."""
    if a & b:
        return 0
    inversions = 0
    bb = b
    j = 0
    while bb:
        if bb & 1:
            inversions += popcount(a >> (j + 1))
        bb >>= 1
        j += 1
    return -1 if inversions & 1 else 1


@lru_cache(maxsize=None)
def basis_masks(n: int, degree: int | None = None) -> tuple[int, ...]:
    """Graded-lex ordered monomials on ``n`` generators (optionally one degree)."""
    degrees = range(n + 1) if degree is None else [degree]
    out = []
    for k in degrees:
        if 0 <= k <= n:
            out.extend(indices_mask(c) for c in itertools.combinations(range(n), k))
    return tuple(out)


@lru_cache(maxsize=None)
def mask_position(n: int, degree: int | None = None) -> dict[int, int]:
    return {m: i for i, m in enumerate(basis_masks(n, degree))}


class FormElement:
    """Sparse element of an exterior algebra over Q(i); zero coefficients are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, object] | None = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                c = as_c(c)
                if c:
                    clean[m] = c
        self.terms: dict[int, C] = clean

    @classmethod
    def _wrap(cls, terms: dict[int, C]) -> "FormElement":
        obj = object.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def one(cls) -> "FormElement":
        return cls._wrap({0: ONE})

    @classmethod
    def generator(cls, i: int) -> "FormElement":
        return cls._wrap({1 << i: ONE})

    @classmethod
    def monomial(cls, indices: Sequence[int], coeff=1) -> "FormElement":
        """``coeff * g^{i1} ^ g^{i2} ^ ...`` in the given (not necessarily sorted) order."""
        out = cls._wrap({0: as_c(coeff)}) if as_c(coeff) else cls()
        for i in indices:
            out = out.wedge(cls.generator(i))
        return out

    @classmethod
    def from_vector(cls, vec: Sequence[C], n: int, degree: int | None = None) -> "FormElement":
        masks = basis_masks(n, degree)
        if len(vec) != len(masks):
            raise DimensionError(f"vector of length {len(vec)} for {len(masks)} monomials")
        return cls._wrap({m: c for m, c in zip(masks, vec) if c})

    def to_vector(self, n: int, degree: int | None = None) -> tuple[C, ...]:
        pos = mask_position(n, degree)
        out = [ZERO] * len(pos)
        for m, c in self.terms.items():
            if m not in pos:
                raise DimensionError(f"monomial {mask_indices(m)} outside the requested degree/space")
            out[pos[m]] = c
        return tuple(out)

    def degrees(self) -> set[int]:
        return {popcount(m) for m in self.terms}

    @property
    def degree(self) -> int | None:
        """Degree of a homogeneous element; None for zero or mixed elements."""
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def part(self, k: int) -> "FormElement":
        return FormElement._wrap({m: c for m, c in self.terms.items() if popcount(m) == k})

    def support(self) -> int:
        s = 0
        for m in self.terms:
            s |= m
        return s

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, FormElement):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "FormElement") -> "FormElement":
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return FormElement._wrap(out)

    def __neg__(self) -> "FormElement":
        return FormElement._wrap({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "FormElement") -> "FormElement":
        return self + (-other)

    def scale(self, c) -> "FormElement":
        c = as_c(c)
        if not c:
            return FormElement()
        return FormElement._wrap({m: c * x for m, x in self.terms.items()})

    def __rmul__(self, c) -> "FormElement":
        return self.scale(c)

    def wedge(self, other: "FormElement") -> "FormElement":
        out: dict[int, C] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                s = wedge_sign(ma, mb)
                if not s:
                    continue
                m = ma | mb
                v = ca * cb if s > 0 else -(ca * cb)
                prev = out.get(m)
                if prev is not None:
                    v = prev + v
                    if not v:
                        del out[m]
                        continue
                out[m] = v
        return FormElement._wrap(out)

    __xor__ = wedge

    def interior(self, j: int) -> "FormElement":
        """Contraction with the j-th dual basis vector, acting from the left."""
        bit = 1 << j
        low = bit - 1
        out = {}
        for m, c in self.terms.items():
            if m & bit:
                out[m ^ bit] = -c if popcount(m & low) & 1 else c
        return FormElement._wrap(out)

    def conj(self) -> "FormElement":
        return FormElement._wrap({m: c.conj() for m, c in self.terms.items()})

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    def sorted_terms(self) -> list[tuple[tuple[int, ...], C]]:
        return sorted(((mask_indices(m), c) for m, c in self.terms.items()), key=lambda t: (len(t[0]), t[0]))

    def format(self, symbol: str = "e") -> str:
        if not self.terms:
            return "0"
        parts = []
        for idx, c in self.sorted_terms():
            mono = "^".join(f"{symbol}{i + 1}" for i in idx) or "1"
            if c == ONE:
                parts.append(f"+{mono}" if idx else "+1")
            elif c == -ONE:
                parts.append(f"-{mono}" if idx else "-1")
            else:
                cs = str(c)
                if not c.is_real() and c.re != 0:
                    cs = f"({cs})"
                sign = ""
                if not cs.startswith("-"):
                    sign = "+"
                parts.append(f"{sign}{cs}{'*' + mono if idx else ''}")
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s

    def __repr__(self) -> str:
        return f"FormElement({self.format()})"


def wedge(a: FormElement, b: FormElement) -> FormElement:
    return a.wedge(b)


def wedge_all(forms: Sequence[FormElement]) -> FormElement:
    out = FormElement.one()
    for f in forms:
        out = out.wedge(f)
    return out


class DGAPresentation:
    """``(wedge^* V, d)`` with ``V`` spanned by degree-one generators.

    The differential is determined by the images of the generators and is
    extended as a derivation.  Construction rejects images that are not of pure
    degree two and presentations with ``d^2 != 0``.
    """

    def __init__(self, d_images: Sequence[FormElement], n_gens: int | None = None):
        self.n_gens = len(d_images) if n_gens is None else n_gens
        if len(d_images) != self.n_gens:
            raise DimensionError(f"{len(d_images)} images for {self.n_gens} generators")
        for i, img in enumerate(d_images):
            if img and img.degrees() != {2}:
                raise DifferentialError(f"d(g{i + 1}) is not of pure degree 2", i)
            if img.support() >> self.n_gens:
                raise DimensionError(f"d(g{i + 1}) uses generators beyond g{self.n_gens}")
        self.d_images: tuple[FormElement, ...] = tuple(d_images)
        self._mono_cache: dict[int, FormElement] = {}
        self._matrix_cache: dict[int, Matrix] = {}
        for i in range(self.n_gens):
            dd = self.d(self.d_images[i])
            if dd:
                raise DifferentialError(f"d^2(g{i + 1}) = {dd.format('g')} != 0", i)

    @property
    def total_dim(self) -> int:
        return 2 ** self.n_gens

    def is_zero(self) -> bool:
        return not any(self.d_images)

    def _d_mono(self, mask: int) -> FormElement:
        hit = self._mono_cache.get(mask)
        if hit is not None:
            return hit
        out = FormElement()
        idx = mask_indices(mask)
        for r, i in enumerate(idx):
            img = self.d_images[i]
            if not img:
                continue
            prefix = indices_mask(idx[:r])
            suffix = indices_mask(idx[r + 1:])
            term = FormElement._wrap({prefix: ONE}).wedge(img).wedge(FormElement._wrap({suffix: ONE}))
            out = out + (term if r % 2 == 0 else -term)
        self._mono_cache[mask] = out
        return out

    def d(self, form: FormElement) -> FormElement:
        out = FormElement()
        for m, c in form.terms.items():
            dm = self._d_mono(m)
            if dm:
                out = out + dm.scale(c)
        return out

    def matrix(self, k: int) -> Matrix:
        """Matrix of ``d: wedge^k -> wedge^(k+1)`` in graded-lex bases."""
        if k in self._matrix_cache:
            return self._matrix_cache[k]
        n = self.n_gens
        src = basis_masks(n, k)
        tgt_pos = mask_position(n, k + 1)
        rows = [[ZERO] * len(src) for _ in range(comb(n, k + 1) if 0 <= k + 1 <= n else 0)]
        for j, m in enumerate(src):
            for tm, c in self._d_mono(m).terms.items():
                rows[tgt_pos[tm]][j] = c
        M = Matrix(rows, cols=len(src))
        self._matrix_cache[k] = M
        return M

    @cached_property
    def full_matrix(self) -> Matrix:
        """Matrix of ``d`` on the whole exterior algebra (graded-lex basis)."""
        n = self.n_gens
        pos = mask_position(n)
        N = 2 ** n
        rows = [[ZERO] * N for _ in range(N)]
        for j, m in enumerate(basis_masks(n)):
            for tm, c in self._d_mono(m).terms.items():
                rows[pos[tm]][j] = c
        return Matrix(rows, cols=N)

    @cached_property
    def cohomology(self) -> "CohomologyData":
        return cohomology(self)


def extend_differential(d_images: Sequence[FormElement], n_gens: int | None = None) -> DGAPresentation:
    """Extend generator images to a derivation; raises DifferentialError if ``d^2 != 0``."""
    return DGAPresentation(d_images, n_gens)


@dataclass(frozen=True)
class CohomologyData:
    n_gens: int
    closed: tuple[Subspace, ...]
    exact: tuple[Subspace, ...]
    representatives_space: tuple[Subspace, ...]

    @property
    def betti(self) -> tuple[int, ...]:
        return tuple(c.dim - e.dim for c, e in zip(self.closed, self.exact))

    def representatives(self, k: int) -> list[FormElement]:
        return [FormElement.from_vector(v, self.n_gens, k) for v in self.representatives_space[k].basis]

    def is_closed(self, form: FormElement, k: int) -> bool:
        return self.closed[k].contains(form.to_vector(self.n_gens, k))

    def is_exact(self, form: FormElement, k: int) -> bool:
        return self.exact[k].contains(form.to_vector(self.n_gens, k))

    def class_coordinates(self, form: FormElement, k: int, check: bool = True) -> tuple[C, ...]:
        """Coordinates of ``[form]`` in the canonical representative basis of ``H^k``.

        ``check=False`` skips the closedness test for forms known to be closed.
        """
        v = form.to_vector(self.n_gens, k)
        if check and not self.closed[k].contains(v):
            raise GKForgeError(f"form of degree {k} is not closed")
        r = self.exact[k].reduce(v)
        return tuple(r[p] for p in self.representatives_space[k].pivots)

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * b for k, b in enumerate(self.betti))


def cohomology(A: DGAPresentation) -> CohomologyData:
    n = A.n_gens
    closed, exact, reps = [], [], []
    for k in range(n + 1):
        Z = kernel(A.matrix(k))
        B = image(A.matrix(k - 1)) if k > 0 else Subspace.zero(1)
        residuals = [B.reduce(z) for z in Z.basis]
        closed.append(Z)
        exact.append(B)
        reps.append(Subspace(comb(n, k), residuals))
    return CohomologyData(n, tuple(closed), tuple(exact), tuple(reps))


@dataclass(frozen=True)
class MasseyResult:
    degrees: tuple[int, int, int]
    first_primitive: FormElement
    second_primitive: FormElement
    representative: FormElement
    representative_class: tuple[C, ...]
    indeterminacy: Subspace
    vanishes: bool


def _solve_exact(A: DGAPresentation, target: FormElement, k: int) -> FormElement | None:
    """Echelon-canonical ``x`` of degree ``k-1`` with ``dx = target``, or None."""
    n = A.n_gens
    if k == 0:
        return FormElement() if not target else None
    x = solve(A.matrix(k - 1), target.to_vector(n, k))
    return None if x is None else FormElement.from_vector(x, n, k - 1)


def massey_triple(
    A: DGAPresentation, a: FormElement, b: FormElement, c: FormElement, _cache: dict | None = None
) -> MasseyResult:
    """Triple Massey product ``<[a],[b],[c]>`` of homogeneous closed forms.

    With ``dx = a^b`` and ``dy = b^c`` the representative is
    ``x^c - (-1)^|a| a^y``; it vanishes iff its class lies in
    ``[a] H^{|b|+|c|-1} + H^{|a|+|b|-1} [c]``.
    """
    H = A.cohomology
    n = A.n_gens
    degs = []
    for name, f in (("a", a), ("b", b), ("c", c)):
        deg = f.degree if f else None
        if deg is None:
            raise GKForgeError(f"{name} must be a nonzero homogeneous form")
        if A.d(f):
            raise GKForgeError(f"{name} is not closed")
        degs.append(deg)
    p, q, r = degs
    ab, bc = a.wedge(b), b.wedge(c)
    x = _solve_exact(A, ab, p + q) if p + q <= n else FormElement()
    y = _solve_exact(A, bc, q + r) if q + r <= n else FormElement()
    if x is None or y is None:
        raise MasseyUndefinedError("undefined Massey product: [a][b] or [b][c] is nonzero in cohomology")
    rep = x.wedge(c) - (a.wedge(y) if p % 2 == 0 else -a.wedge(y))
    deg = p + q + r - 1
    if deg > n:
        return MasseyResult((p, q, r), x, y, FormElement(), (), Subspace.zero(0), True)
    if A.d(rep):
        raise GKForgeError("internal error: Massey representative is not closed")
    key = (a, c, q)
    indet = _cache.get(key) if _cache is not None else None
    if indet is None:
        gens = []
        for h in H.representatives(q + r - 1) if 0 <= q + r - 1 <= n else []:
            gens.append(H.class_coordinates(a.wedge(h), deg, check=False))
        for h in H.representatives(p + q - 1) if 0 <= p + q - 1 <= n else []:
            gens.append(H.class_coordinates(h.wedge(c), deg, check=False))
        indet = Subspace(H.betti[deg], gens)
        if _cache is not None:
            _cache[key] = indet
    cls = H.class_coordinates(rep, deg, check=False)
    return MasseyResult((p, q, r), x, y, rep, cls, indet, indet.contains(cls))


@dataclass
class MasseySearch:
    max_degree: int
    tried: int = 0
    defined: int = 0
    nonvanishing: list[tuple[tuple[int, int, int], MasseyResult]] = field(default_factory=list)

    @property
    def obstruction_found(self) -> bool:
        return bool(self.nonvanishing)


def massey_search(A: DGAPresentation, max_degree: int | None = None, stop_at_first: bool = False) -> MasseySearch:
    """Enumerate triples of canonical ``H^1``/``H^2`` representatives.

    Triples whose product degree exceeds ``max_degree`` (default: the number
    of generators) are skipped, as are undefined ones.  Each hit is recorded
    with the positions of its three entries in the representative list.
    """
    n = A.n_gens
    if max_degree is None:
        max_degree = n
    H = A.cohomology
    reps: list[tuple[FormElement, int]] = []
    for k in (1, 2):
        if k <= n:
            reps.extend((f, k) for f in H.representatives(k))
    out = MasseySearch(max_degree)
    exact_cache: dict[tuple[int, int], bool] = {}
    indet_cache: dict = {}

    def product_exact(i: int, j: int) -> bool:
        key = (i, j)
        if key not in exact_cache:
            (f, p), (g, q) = reps[i], reps[j]
            if p + q > n:
                exact_cache[key] = True
            else:
                exact_cache[key] = H.is_exact(f.wedge(g), p + q)
        return exact_cache[key]

    for i, j, k in itertools.product(range(len(reps)), repeat=3):
        (a, p), (b, q), (c, r) = reps[i], reps[j], reps[k]
        if p + q + r - 1 > max_degree:
            continue
        out.tried += 1
        if not (product_exact(i, j) and product_exact(j, k)):
            continue
        res = massey_triple(A, a, b, c, indet_cache)
        out.defined += 1
        if not res.vanishes:
            out.nonvanishing.append(((i, j, k), res))
            if stop_at_first:
                break
    return out


@dataclass(frozen=True)
class Filtration:
    steps: tuple[Subspace, ...]
    compatible_basis: tuple[FormElement, ...]

    @property
    def length(self) -> int:
        return len(self.steps)


def _wedge2_span(vectors: Sequence[tuple[C, ...]], n: int) -> Subspace:
    forms = [FormElement.from_vector(v, n, 1) for v in vectors]
    prods = [forms[i].wedge(forms[j]).to_vector(n, 2) for i in range(len(forms)) for j in range(i + 1, len(forms))]
    return Subspace(comb(n, 2), prods)


def nilpotent_filtration(A: DGAPresentation) -> Filtration:
    """``V_1 = ker d``, ``V_i = {v : dv in wedge^2 V_(i-1)}`` until it reaches ``V``.

    Raises NotNilpotentError when the filtration stalls below ``V``.
    """
    n = A.n_gens
    D = A.matrix(1)
    steps = [kernel(D)]
    while steps[-1].dim < n:
        nxt = preimage(D, _wedge2_span(steps[-1].basis, n))
        if nxt.dim == steps[-1].dim:
            raise NotNilpotentError(
                f"filtration stalls at step {len(steps)} with dimension {nxt.dim} < {n}",
                len(steps),
                nxt.dim,
            )
        steps.append(nxt)
    chosen: list[tuple[C, ...]] = []
    for S in steps:
        for b in S.basis:
            if not Subspace(n, chosen).contains(b):
                chosen.append(b)
    return Filtration(tuple(steps), tuple(FormElement.from_vector(v, n, 1) for v in chosen))


def _as_degree_one(basis: Sequence[FormElement], n: int) -> list[tuple[C, ...]]:
    vecs = []
    for b in basis:
        if b.degrees() - {1}:
            raise GKForgeError("basis elements must be 1-forms")
        vecs.append(b.to_vector(n, 1))
    if len(vecs) != n or Subspace(n, vecs).dim != n:
        raise GKForgeError(f"the {len(vecs)} given 1-forms do not form a basis of the {n} generators")
    return vecs


def check_minimal_basis(A: DGAPresentation, basis: Sequence[FormElement]) -> bool:
    """True iff ``d b_i`` lies in the subalgebra generated by ``b_1 .. b_(i-1)`` for every i."""
    n = A.n_gens
    vecs = _as_degree_one(basis, n)
    for i, b in enumerate(basis):
        if not _wedge2_span(vecs[:i], n).contains(A.d(b).to_vector(n, 2)):
            return False
    return True


@dataclass(frozen=True)
class WitnessReport:
    found: bool
    reason: str
    basis: tuple[FormElement, ...]
    product: FormElement | None = None
    primitive: FormElement | None = None
    volume: FormElement | None = None
    product_exact: bool = False
    volume_class_nonzero: bool = False


def nonformality_witness(A: DGAPresentation, basis: Sequence[FormElement]) -> WitnessReport:
    """Look for the volume-form obstruction to a quasi-isomorphism onto cohomology.

    With a minimal ordered basis ``b_1..b_n``: if ``b_1^...^b_(n-1) = dx`` is exact while
    the volume ``b_1^...^b_n`` has a nonzero class, any multiplicative map
    to cohomology would send the volume to ``0 * [b_n] = 0``.
    """
    n = A.n_gens
    basis = tuple(basis)
    if not check_minimal_basis(A, basis):
        raise GKForgeError("basis is not minimal: some d(b_i) leaves the algebra on earlier elements")
    if n == 0:
        return WitnessReport(False, "no generators", basis)
    product = wedge_all(basis[: n - 1])
    volume = product.wedge(basis[n - 1])
    x = _solve_exact(A, product, n - 1)
    # independent re-checks by direct differentiation and rank comparison
    product_exact = x is not None and A.d(x) == product
    top = A.matrix(n - 1)
    vol_vec = volume.to_vector(n, n)
    augmented = Matrix([r + (v,) for r, v in zip(top.data, vol_vec)], cols=top.cols + 1)
    volume_nonzero = bool(volume) and augmented.rank() > top.rank()
    if not product_exact:
        return WitnessReport(False, "product of the first n-1 basis elements is not exact", basis, product, None, volume, False, volume_nonzero)
    if not volume_nonzero:
        return WitnessReport(False, "volume form is exact", basis, product, x, volume, True, False)
    return WitnessReport(True, "volume class is nonzero while b_1^...^b_(n-1) is exact", basis, product, x, volume, True, True)
