"""Exact arithmetic over Q and Q(i), and the linear algebra built on it.

Everything here is exact.  Gaussian rationals are stored as ``(a + b*i) / d``
with integer ``a``, ``b`` and a positive integer ``d`` sharing no common
factor, so equality is structural and hashing is cheap.

Vectors are plain tuples of :class:`C`.  Matrices are dense and immutable;
the ambient spaces in this package never exceed a few hundred coordinates.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionError, GKForgeError

__all__ = [
    "C",
    "ZERO",
    "ONE",
    "I",
    "as_c",
    "Matrix",
    "Subspace",
    "DirectSum",
    "rref",
    "kernel",
    "image",
    "intersect",
    "subspace_sum",
    "contains",
    "subspace_equal",
    "solve",
    "preimage",
    "is_positive_definite",
]


class C:
    """A Gaussian rational ``(a + b i) / d``."""

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re_part=0, im_part=0):
        re_q = Fraction(re_part)
        im_q = Fraction(im_part)
        d = re_q.denominator * im_q.denominator // math.gcd(re_q.denominator, im_q.denominator)
        a = re_q.numerator * (d // re_q.denominator)
        b = im_q.numerator * (d // im_q.denominator)
        g = math.gcd(a, b, d)
        self._a, self._b, self._d = a // g, b // g, d // g

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> "C":
        if d < 0:
            a, b, d = -a, -b, -d
        g = math.gcd(a, b, d)
        if g != 1:
            a, b, d = a // g, b // g, d // g
        obj = object.__new__(cls)
        obj._a, obj._b, obj._d = a, b, d
        return obj

    @classmethod
    def parse(cls, text: str) -> "C":
        """Parse ``"p/q"``, ``"p/q i"``, ``"p/q+r/s i"`` (also ``"i"``, ``"-i"``)."""
        s = str(text).replace(" ", "")
        if not s:
            raise ValueError("empty scalar")
        if not s.endswith("i"):
            return cls(_parse_rational(s))
        body = s[:-1]
        # split at the last sign that is not at position 0 and not after '/'
        cut = None
        for pos in range(len(body) - 1, 0, -1):
            if body[pos] in "+-" and body[pos - 1] not in "/eE":
                cut = pos
                break
        if cut is None:
            real, imag = "0", body
        else:
            real, imag = body[:cut], body[cut:]
        if imag in ("", "+"):
            imag = "1"
        elif imag == "-":
            imag = "-1"
        return cls(_parse_rational(real), _parse_rational(imag))

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    def is_real(self) -> bool:
        return self._b == 0

    def conj(self) -> "C":
        if self._b == 0:
            return self
        return C._raw(self._a, -self._b, self._d)

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, C):
            return self._a == other._a and self._b == other._b and self._d == other._d
        if isinstance(other, (int, Fraction)):
            return self._b == 0 and Fraction(self._a, self._d) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __neg__(self) -> "C":
        return C._raw(-self._a, -self._b, self._d)

    def __add__(self, other) -> "C":
        o = as_c(other)
        if self._d == o._d:
            return C._raw(self._a + o._a, self._b + o._b, self._d)
        return C._raw(self._a * o._d + o._a * self._d, self._b * o._d + o._b * self._d, self._d * o._d)

    __radd__ = __add__

    def __sub__(self, other) -> "C":
        o = as_c(other)
        if self._d == o._d:
            return C._raw(self._a - o._a, self._b - o._b, self._d)
        return C._raw(self._a * o._d - o._a * self._d, self._b * o._d - o._b * self._d, self._d * o._d)

    def __rsub__(self, other) -> "C":
        return as_c(other) - self

    def __mul__(self, other) -> "C":
        o = as_c(other)
        a1, b1, a2, b2 = self._a, self._b, o._a, o._b
        return C._raw(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, self._d * o._d)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "C":
        o = as_c(other)
        if not o:
            raise ZeroDivisionError("division by zero in Q(i)")
        a1, b1, a2, b2 = self._a, self._b, o._a, o._b
        return C._raw((a1 * a2 + b1 * b2) * o._d, (b1 * a2 - a1 * b2) * o._d, self._d * (a2 * a2 + b2 * b2))

    def __rtruediv__(self, other) -> "C":
        return as_c(other) / self

    def __pow__(self, k: int) -> "C":
        if k < 0:
            return ONE / (self ** -k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self) -> str:
        return f"C({self!s})"

    def __str__(self) -> str:
        if self._b == 0:
            return str(self.re)
        im = self.im
        mag = "i" if abs(im) == 1 else f"{abs(im)} i"
        if self._a == 0:
            return ("-" if im < 0 else "") + mag
        return f"{self.re}{'-' if im < 0 else '+'}{mag}"


_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def _parse_rational(s: str) -> Fraction:
    if not _RATIONAL_RE.match(s):
        raise ValueError(f"malformed rational {s!r}")
    return Fraction(s)


ZERO = C(0)
ONE = C(1)
I = C(0, 1)


def as_c(x) -> C:
    if isinstance(x, C):
        return x
    if isinstance(x, (int, Fraction)):
        return C(x)
    if isinstance(x, str):
        return C.parse(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to a Gaussian rational")


def as_vector(v: Iterable) -> tuple[C, ...]:
    return tuple(as_c(x) for x in v)


def dot(u: Sequence[C], v: Sequence[C]) -> C:
    """Bilinear (not Hermitian) dot product."""
    s = ZERO
    for x, y in zip(u, v):
        if x and y:
            s = s + x * y
    return s


def vconj(v: Sequence[C]) -> tuple[C, ...]:
    return tuple(x.conj() for x in v)


def vadd(u: Sequence[C], v: Sequence[C]) -> tuple[C, ...]:
    return tuple(x + y for x, y in zip(u, v))


def vscale(c: C, v: Sequence[C]) -> tuple[C, ...]:
    return tuple(c * x if x else ZERO for x in v)


def is_zero_vector(v: Sequence[C]) -> bool:
    return not any(v)


class Matrix:
    """Dense immutable matrix over Q(i)."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data: Iterable[Iterable], cols: int | None = None):
        rows_ = tuple(as_vector(r) for r in data)
        if cols is None:
            cols = len(rows_[0]) if rows_ else 0
        for r in rows_:
            if len(r) != cols:
                raise DimensionError(f"ragged matrix row of length {len(r)}, expected {cols}")
        self.data = rows_
        self.rows = len(rows_)
        self.cols = cols

    @classmethod
    def _wrap(cls, data: tuple[tuple[C, ...], ...], cols: int) -> "Matrix":
        obj = object.__new__(cls)
        obj.data, obj.rows, obj.cols = data, len(data), cols
        return obj

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "Matrix":
        row = (ZERO,) * cols
        return cls._wrap(tuple(row for _ in range(rows)), cols)

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls._wrap(tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)), n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[C]], rows: int) -> "Matrix":
        if not columns:
            return cls.zeros(rows, 0)
        return cls._wrap(tuple(tuple(col[i] for col in columns) for i in range(rows)), len(columns))

    @classmethod
    def block(cls, blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        out = []
        for brow in blocks:
            h = brow[0].rows
            for i in range(h):
                row: list[C] = []
                for b in brow:
                    row.extend(b.data[i])
                out.append(tuple(row))
        return cls._wrap(tuple(out), len(out[0]) if out else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple[C, ...]:
        return self.data[i]

    def column(self, j: int) -> tuple[C, ...]:
        return tuple(r[j] for r in self.data)

    def columns(self) -> list[tuple[C, ...]]:
        return [self.column(j) for j in range(self.cols)]

    @property
    def T(self) -> "Matrix":
        if not self.rows or not self.cols:
            return Matrix.zeros(self.cols, self.rows)
        return Matrix._wrap(tuple(zip(*self.data)), self.rows)

    def conj(self) -> "Matrix":
        return Matrix._wrap(tuple(vconj(r) for r in self.data), self.cols)

    def is_real(self) -> bool:
        return all(x.is_real() for r in self.data for x in r)

    def is_zero(self) -> bool:
        return not any(any(r) for r in self.data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.data == other.data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix._wrap(tuple(vadd(r, s) for r, s in zip(self.data, other.data)), self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_shape(other)
        return Matrix._wrap(tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(self.data, other.data)), self.cols)

    def __neg__(self) -> "Matrix":
        return Matrix._wrap(tuple(tuple(-x for x in r) for r in self.data), self.cols)

    def scale(self, c) -> "Matrix":
        c = as_c(c)
        return Matrix._wrap(tuple(vscale(c, r) for r in self.data), self.cols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        n = other.cols
        out = []
        for r in self.data:
            acc = [ZERO] * n
            for k, x in enumerate(r):
                if not x:
                    continue
                orow = other.data[k]
                for j in range(n):
                    y = orow[j]
                    if y:
                        acc[j] = acc[j] + x * y
            out.append(tuple(acc))
        return Matrix._wrap(tuple(out), n)

    def apply(self, v: Sequence[C]) -> tuple[C, ...]:
        if len(v) != self.cols:
            raise DimensionError(f"vector of length {len(v)} for a matrix with {self.cols} columns")
        nz = [(k, x) for k, x in enumerate(v) if x]
        out = []
        for r in self.data:
            s = ZERO
            for k, x in nz:
                y = r[k]
                if y:
                    s = s + y * x
            out.append(s)
        return tuple(out)

    def rank(self) -> int:
        return rref(self)[1]

    def inverse(self) -> "Matrix":
        if self.rows != self.cols:
            raise DimensionError("inverse of a non-square matrix")
        n = self.rows
        aug = Matrix._wrap(tuple(r + tuple(ONE if i == j else ZERO for j in range(n)) for i, r in enumerate(self.data)), 2 * n)
        red, rank, pivots = rref(aug)
        if rank < n or pivots[n - 1] != n - 1:
            raise GKForgeError("matrix is singular")
        return Matrix._wrap(tuple(r[n:] for r in red.data[:n]), n)

    def _same_shape(self, other: "Matrix") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def __repr__(self) -> str:
        return f"Matrix({[[str(x) for x in r] for r in self.data]})"


def _rref_rows(rows: list[list[C]], cols: int) -> tuple[list[list[C]], list[int]]:
    """In-place Gauss-Jordan on a list of mutable rows; returns (nonzero rows, pivots)."""
    pivots: list[int] = []
    r = 0
    n = len(rows)
    for c in range(cols):
        if r >= n:
            break
        p = next((i for i in range(r, n) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        prow = rows[r]
        inv = ONE / prow[c]
        if inv != ONE:
            for j in range(c, cols):
                if prow[j]:
                    prow[j] = prow[j] * inv
        nzc = [j for j in range(c, cols) if prow[j]]
        for i in range(n):
            if i == r:
                continue
            f = rows[i][c]
            if not f:
                continue
            row = rows[i]
            for j in nzc:
                row[j] = row[j] - f * prow[j]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rref(M: Matrix) -> tuple[Matrix, int, list[int]]:
    """Reduced row-echelon form. Zero rows are kept at the bottom."""
    rows = [list(r) for r in M.data]
    nonzero, pivots = _rref_rows(rows, M.cols)
    rank = len(pivots)
    full = [tuple(r) for r in nonzero] + [(ZERO,) * M.cols] * (M.rows - rank)
    return Matrix._wrap(tuple(full), M.cols), rank, pivots


class Subspace:
    """A subspace of Q(i)^n held by its canonical reduced row-echelon basis."""

    __slots__ = ("ambient_dim", "basis", "pivots")

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence] = ()):
        rows = [list(as_vector(v)) for v in vectors]
        for r in rows:
            if len(r) != ambient_dim:
                raise DimensionError(f"vector of length {len(r)} in ambient dimension {ambient_dim}")
        nonzero, pivots = _rref_rows(rows, ambient_dim)
        self.ambient_dim = ambient_dim
        self.basis: tuple[tuple[C, ...], ...] = tuple(tuple(r) for r in nonzero)
        self.pivots: tuple[int, ...] = tuple(pivots)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, Matrix.identity(n).data)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> Matrix:
        """Basis vectors as rows."""
        return Matrix._wrap(self.basis, self.ambient_dim)

    def reduce(self, v: Sequence[C]) -> tuple[C, ...]:
        """Residual of ``v`` after clearing every pivot coordinate."""
        w = list(v)
        for p, b in zip(self.pivots, self.basis):
            f = w[p]
            if f:
                for j in range(p, self.ambient_dim):
                    if b[j]:
                        w[j] = w[j] - f * b[j]
        return tuple(w)

    def contains(self, v: Sequence) -> bool:
        v = as_vector(v)
        if len(v) != self.ambient_dim:
            raise DimensionError(f"vector of length {len(v)} in ambient dimension {self.ambient_dim}")
        return not any(self.reduce(v))

    def coordinates(self, v: Sequence[C]) -> tuple[C, ...]:
        """Coefficients of ``v`` in the canonical basis (``v`` must lie in the space)."""
        v = as_vector(v)
        if not self.contains(v):
            raise GKForgeError("vector is not in the subspace")
        return tuple(v[p] for p in self.pivots)

    def combine(self, coords: Sequence[C]) -> tuple[C, ...]:
        out = [ZERO] * self.ambient_dim
        for c, b in zip(coords, self.basis):
            if c:
                for j, x in enumerate(b):
                    if x:
                        out[j] = out[j] + c * x
        return tuple(out)

    def conj(self) -> "Subspace":
        return Subspace(self.ambient_dim, (vconj(b) for b in self.basis))

    def is_subspace_of(self, other: "Subspace") -> bool:
        _check_ambient(self, other)
        return all(other.contains(b) for b in self.basis)

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(ambient={self.ambient_dim}, dim={self.dim})"


def _check_ambient(S1: Subspace, S2: Subspace) -> None:
    if S1.ambient_dim != S2.ambient_dim:
        raise DimensionError(f"ambient dimension mismatch: {S1.ambient_dim} vs {S2.ambient_dim}")


def kernel(M: Matrix) -> Subspace:
    """``{v : M v = 0}``."""
    red, rank, pivots = rref(M)
    free = [j for j in range(M.cols) if j not in set(pivots)]
    vecs = []
    for f in free:
        v = [ZERO] * M.cols
        v[f] = ONE
        for i, p in enumerate(pivots):
            x = red.data[i][f]
            if x:
                v[p] = -x
        vecs.append(v)
    return Subspace(M.cols, vecs)


def image(M: Matrix) -> Subspace:
    """Column span of ``M``."""
    return Subspace(M.rows, M.columns())


def intersect(S1: Subspace, S2: Subspace) -> Subspace:
    _check_ambient(S1, S2)
    if not S1.dim or not S2.dim:
        return Subspace.zero(S1.ambient_dim)
    # columns u_1..u_a, -w_1..-w_b; a kernel vector (x, y) gives sum x_i u_i in both
    cols = list(S1.basis) + [tuple(-x for x in w) for w in S2.basis]
    K = kernel(Matrix.from_columns(cols, S1.ambient_dim))
    return Subspace(S1.ambient_dim, (S1.combine(k[: S1.dim]) for k in K.basis))


def subspace_sum(S1: Subspace, S2: Subspace) -> Subspace:
    _check_ambient(S1, S2)
    return Subspace(S1.ambient_dim, S1.basis + S2.basis)


def contains(S: Subspace, v: Sequence) -> bool:
    return S.contains(v)


def subspace_equal(S1: Subspace, S2: Subspace) -> bool:
    _check_ambient(S1, S2)
    return S1.basis == S2.basis


def solve(M: Matrix, b: Sequence) -> tuple[C, ...] | None:
    """The solution of ``M x = b`` with every free variable set to zero, or None."""
    b = as_vector(b)
    if len(b) != M.rows:
        raise DimensionError(f"right-hand side of length {len(b)} for {M.rows} rows")
    aug = Matrix._wrap(tuple(r + (y,) for r, y in zip(M.data, b)), M.cols + 1)
    red, rank, pivots = rref(aug)
    if pivots and pivots[-1] == M.cols:
        return None
    x = [ZERO] * M.cols
    for i, p in enumerate(pivots):
        x[p] = red.data[i][M.cols]
    return tuple(x)


def preimage(M: Matrix, S: Subspace) -> Subspace:
    """``{v : M v in S}``."""
    if S.ambient_dim != M.rows:
        raise DimensionError("target subspace does not live in the codomain")
    if S.dim == 0:
        return kernel(M)
    cols = M.columns() + [tuple(-x for x in s) for s in S.basis]
    K = kernel(Matrix.from_columns(cols, M.rows))
    return Subspace(M.cols, (k[: M.cols] for k in K.basis))


def is_positive_definite(S: Matrix) -> bool:
    """Exact test via symmetric elimination: every pivot must be positive."""
    if S.rows != S.cols:
        raise DimensionError("positive-definiteness of a non-square matrix")
    if not S.is_real():
        raise GKForgeError("positive-definiteness needs real entries")
    if S.T != S:
        raise GKForgeError("matrix is not symmetric")
    n = S.rows
    a = [[x.re for x in row] for row in S.data]
    for k in range(n):
        piv = a[k][k]
        if piv <= 0:
            return False
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return True


class DirectSum:
    """A labelled family of subspaces whose sum is the whole ambient space.

    Construction fails unless the family is a direct-sum decomposition; afterwards
    any vector splits uniquely into components and projectors are available.
    """

    def __init__(self, ambient_dim: int, parts: dict):
        self.ambient_dim = ambient_dim
        self.parts: dict = dict(parts)
        self.labels = list(self.parts)
        cols: list[tuple[C, ...]] = []
        self._slices: dict = {}
        for lab in self.labels:
            S = self.parts[lab]
            if S.ambient_dim != ambient_dim:
                raise DimensionError(f"part {lab!r} lives in dimension {S.ambient_dim}")
            self._slices[lab] = (len(cols), len(cols) + S.dim)
            cols.extend(S.basis)
        if len(cols) != ambient_dim:
            raise GKForgeError(f"dimensions of the parts sum to {len(cols)}, not {ambient_dim}")
        self.basis_matrix = Matrix.from_columns(cols, ambient_dim)
        try:
            self._inv = self.basis_matrix.inverse()
        except GKForgeError:
            raise GKForgeError("parts are not independent: the sum is not direct") from None

    def components(self, v: Sequence[C]) -> dict:
        coords = self._inv.apply(tuple(v))
        out = {}
        for lab in self.labels:
            lo, hi = self._slices[lab]
            out[lab] = self.parts[lab].combine(coords[lo:hi]) if hi > lo else (ZERO,) * self.ambient_dim
        return out

    def component(self, label, v: Sequence[C]) -> tuple[C, ...]:
        lo, hi = self._slices[label]
        coords = self._inv.apply(tuple(v))
        return self.parts[label].combine(coords[lo:hi])

    def projector(self, label) -> Matrix:
        lo, hi = self._slices[label]
        P = self.basis_matrix
        left = Matrix.from_columns([P.column(j) for j in range(lo, hi)], self.ambient_dim)
        right = Matrix._wrap(self._inv.data[lo:hi], self.ambient_dim)
        return left @ right

    def split_operator(self, op: Matrix, classify) -> dict:
        """Split ``op`` into blocks ``Proj[dst] . op . Proj[src]`` grouped by ``classify(src, dst)``.

        Returns a dict from group key to the summed operator in ambient coordinates;
        blocks that are identically zero are not reported.
        """
        P, Pinv = self.basis_matrix, self._inv
        coord_op = Pinv @ op @ P
        n = self.ambient_dim
        groups: dict = {}
        for src in self.labels:
            slo, shi = self._slices[src]
            for dst in self.labels:
                dlo, dhi = self._slices[dst]
                if not any(coord_op.data[i][j] for i in range(dlo, dhi) for j in range(slo, shi)):
                    continue
                key = classify(src, dst)
                keep = groups.setdefault(key, [[ZERO] * n for _ in range(n)])
                for i in range(dlo, dhi):
                    for j in range(slo, shi):
                        keep[i][j] = coord_op.data[i][j]
        return {key: P @ Matrix._wrap(tuple(tuple(r) for r in keep), n) @ Pinv for key, keep in groups.items()}
