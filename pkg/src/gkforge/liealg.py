"""Finite-dimensional Lie algebras given by structure constants.

Basis vectors are ``e_0 .. e_(m-1)`` internally (printed 1-based).  The bracket
is stored only for ``i < j``: ``[e_i, e_j] = sum_k c[(i, j)][k] e_k``.  Constants
may be Gaussian rationals so that complex subalgebras of a complexified double
can be handled by the same code.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import dga
from .dga import DGAPresentation, FormElement, Filtration
from .errors import CatalogError, DimensionError
from .exactlin import ONE, ZERO, C, Subspace, as_c, vadd

__all__ = [
    "LieAlgebra",
    "JacobiReport",
    "check_jacobi",
    "CentralSeries",
    "lower_central_series",
    "ce_images",
    "ce_differential",
    "filtration",
    "check_minimal_basis",
]


class LieAlgebra:
    """Antisymmetric structure constants on an ``m``-dimensional space.

    The Jacobi identity is not enforced here; use :func:`check_jacobi`.
    """

    def __init__(self, dim: int, brackets: Mapping[tuple[int, int], Mapping[int, object]] | None = None):
        if dim < 1:
            raise DimensionError("a Lie algebra needs positive dimension")
        self.dim = dim
        table: dict[tuple[int, int], dict[int, C]] = {}
        for (i, j), out in (brackets or {}).items():
            if not (0 <= i < j < dim):
                raise DimensionError(f"bracket key ({i}, {j}) must satisfy 0 <= i < j < {dim}")
            row = {}
            for k, c in out.items():
                if not 0 <= k < dim:
                    raise DimensionError(f"bracket output index {k} out of range")
                c = as_c(c)
                if c:
                    row[k] = c
            if row:
                table[(i, j)] = row
        self.brackets = table

    @classmethod
    def abelian(cls, dim: int) -> "LieAlgebra":
        return cls(dim, {})

    @classmethod
    def from_entries(cls, dim: int, entries: Iterable[tuple[int, int, int, object]]) -> "LieAlgebra":
        """Build from ``(i, j, k, c)`` meaning ``[e_i, e_j] contains c e_k`` (0-based).

        Both orders of ``(i, j)`` may appear as long as they are negatives of
        each other.
        """
        acc: dict[tuple[int, int, int], C] = {}
        for i, j, k, c in entries:
            c = as_c(c)
            for idx in (i, j, k):
                if not 0 <= idx < dim:
                    raise DimensionError(f"index {idx} out of range for dimension {dim}")
            if i == j:
                if c:
                    raise CatalogError(f"[e{i + 1}, e{i + 1}] must vanish (got {c} e{k + 1})")
                continue
            key = (min(i, j), max(i, j), k)
            val = c if i < j else -c
            if key in acc and acc[key] != val:
                raise CatalogError(
                    f"structure constants not antisymmetric: c^{k + 1}_{{{i + 1}{j + 1}}} = {c} "
                    f"but c^{k + 1}_{{{j + 1}{i + 1}}} = {-acc[key] if i < j else acc[key]}"
                )
            acc[key] = val
        table: dict[tuple[int, int], dict[int, C]] = {}
        for (i, j, k), c in acc.items():
            table.setdefault((i, j), {})[k] = c
        return cls(dim, table)

    @classmethod
    def from_tensor(cls, c: Sequence[Sequence[Sequence[object]]]) -> "LieAlgebra":
        """``c[k][i][j]``; rejects tensors that are not antisymmetric in ``(i, j)``."""
        m = len(c)
        entries = []
        for k in range(m):
            for i in range(m):
                for j in range(m):
                    entries.append((i, j, k, c[k][i][j]))
        return cls.from_entries(m, entries)

    def structure_constant(self, k: int, i: int, j: int) -> C:
        if i == j:
            return ZERO
        if i < j:
            return self.brackets.get((i, j), {}).get(k, ZERO)
        return -self.brackets.get((j, i), {}).get(k, ZERO)

    def bracket_basis(self, i: int, j: int) -> tuple[C, ...]:
        v = [ZERO] * self.dim
        if i == j:
            return tuple(v)
        sign = ONE if i < j else -ONE
        for k, c in self.brackets.get((min(i, j), max(i, j)), {}).items():
            v[k] = sign * c
        return tuple(v)

    def bracket(self, x: Sequence, y: Sequence) -> tuple[C, ...]:
        x = [as_c(a) for a in x]
        y = [as_c(b) for b in y]
        out = [ZERO] * self.dim
        for (i, j), row in self.brackets.items():
            coeff = x[i] * y[j] - x[j] * y[i]
            if coeff:
                for k, c in row.items():
                    out[k] = out[k] + coeff * c
        return tuple(out)

    def is_abelian(self) -> bool:
        return not self.brackets

    def is_real(self) -> bool:
        return all(c.is_real() for row in self.brackets.values() for c in row.values())

    def entries(self) -> list[tuple[int, int, int, C]]:
        return sorted((i, j, k, c) for (i, j), row in self.brackets.items() for k, c in row.items())

    def __eq__(self, other) -> bool:
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return self.dim == other.dim and self.brackets == other.brackets

    def __hash__(self) -> int:
        return hash((self.dim, tuple(self.entries())))

    def __repr__(self) -> str:
        parts = [f"[e{i + 1},e{j + 1}]={c}*e{k + 1}" for i, j, k, c in self.entries()]
        return f"LieAlgebra(dim={self.dim}, {', '.join(parts) or 'abelian'})"


@dataclass(frozen=True)
class JacobiReport:
    ok: bool
    failures: tuple[tuple[tuple[int, int, int], tuple[C, ...]], ...]

    def __bool__(self) -> bool:
        return self.ok


def jacobiator(g: LieAlgebra, i: int, j: int, k: int) -> tuple[C, ...]:
    """``[[e_i, e_j], e_k] + [[e_j, e_k], e_i] + [[e_k, e_i], e_j]``."""
    ek = _unit(g.dim, k)
    ei = _unit(g.dim, i)
    ej = _unit(g.dim, j)
    out = g.bracket(g.bracket_basis(i, j), ek)
    out = vadd(out, g.bracket(g.bracket_basis(j, k), ei))
    return vadd(out, g.bracket(g.bracket_basis(k, i), ej))


def _unit(n: int, i: int) -> tuple[C, ...]:
    return tuple(ONE if t == i else ZERO for t in range(n))


def check_jacobi(g: LieAlgebra) -> JacobiReport:
    failures = []
    for i, j, k in itertools.combinations(range(g.dim), 3):
        jac = jacobiator(g, i, j, k)
        if any(jac):
            failures.append(((i, j, k), jac))
    return JacobiReport(not failures, tuple(failures))


@dataclass(frozen=True)
class CentralSeries:
    series: tuple[Subspace, ...]
    is_nilpotent: bool
    step: int | None


def lower_central_series(g: LieAlgebra) -> CentralSeries:
    """``g ⊇ [g,g] ⊇ [g,[g,g]] ⊇ ...`` until it reaches zero or stabilizes."""
    m = g.dim
    series = [Subspace.full(m)]
    while series[-1].dim:
        prev = series[-1]
        vecs = [g.bracket(_unit(m, i), b) for i in range(m) for b in prev.basis]
        nxt = Subspace(m, vecs)
        if nxt == prev:
            return CentralSeries(tuple(series), False, None)
        series.append(nxt)
    return CentralSeries(tuple(series), True, len(series) - 1)


def ce_images(g: LieAlgebra) -> list[FormElement]:
    """``d e^k = -sum_{i<j} c^k_ij e^i ^ e^j``, i.e. ``(d xi)(X, Y) = -xi([X, Y])``."""
    images: list[dict[int, C]] = [{} for _ in range(g.dim)]
    for (i, j), row in g.brackets.items():
        for k, c in row.items():
            images[k][(1 << i) | (1 << j)] = -c
    return [FormElement(t) for t in images]


def ce_differential(g: LieAlgebra) -> DGAPresentation:
    """Chevalley–Eilenberg complex; raises DifferentialError when Jacobi fails."""
    return DGAPresentation(ce_images(g), g.dim)


def filtration(g: LieAlgebra) -> Filtration:
    """Ascending filtration of the dual by ``ker d`` and its iterated preimages."""
    return dga.nilpotent_filtration(ce_differential(g))


def check_minimal_basis(g: LieAlgebra, basis: Sequence[FormElement]) -> bool:
    return dga.check_minimal_basis(ce_differential(g), basis)

