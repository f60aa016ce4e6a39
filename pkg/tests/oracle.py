"""Independent reference computations used to cross-check the package.

Nothing here imports gkforge.  Forms are dicts from sorted index tuples to
sympy numbers; the exterior derivative is evaluated from the invariant
formula on basis vectors and ranks come from sympy's dense elimination.
"""

from __future__ import annotations

import itertools

import sympy


def perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
            elif seq[i] == seq[j]:
                return 0
    return sign


def wedge(a: dict, b: dict) -> dict:
    out: dict = {}
    for I, x in a.items():
        for J, y in b.items():
            s = perm_sign(I + J)
            if s:
                K = tuple(sorted(I + J))
                out[K] = out.get(K, 0) + s * x * y
    return {k: v for k, v in out.items() if v != 0}


def _evaluate(I: tuple, vectors: list[dict]) -> sympy.Expr:
    """``e^I(v_1, .., v_k)`` as a determinant of coordinates."""
    M = sympy.Matrix([[v.get(i, 0) for v in vectors] for i in I])
    return M.det()


def bracket(c, x: dict, y: dict) -> dict:
    """``c[k][i][j]`` structure constants; vectors as index -> coefficient."""
    n = len(c)
    out: dict = {}
    for i, a in x.items():
        for j, b in y.items():
            for k in range(n):
                if c[k][i][j]:
                    out[k] = out.get(k, 0) + a * b * c[k][i][j]
    return out


def d_matrix(c, k: int) -> sympy.Matrix:
    """Matrix of d from k-forms to (k+1)-forms on the lexicographic subset bases.

    ``(d w)(x_0..x_k) = sum_{a<b} (-1)^(a+b) w([x_a, x_b], x_0..^a..^b..x_k)``.
    """
    n = len(c)
    src = list(itertools.combinations(range(n), k))
    dst = list(itertools.combinations(range(n), k + 1))
    M = sympy.zeros(len(dst), len(src))
    for col, I in enumerate(src):
        for row, J in enumerate(dst):
            total = 0
            for a, b in itertools.combinations(range(k + 1), 2):
                br = bracket(c, {J[a]: 1}, {J[b]: 1})
                if not br:
                    continue
                rest = [{J[t]: 1} for t in range(k + 1) if t not in (a, b)]
                total += (-1) ** (a + b) * _evaluate(I, [br] + rest)
            M[row, col] = total
    return M


def betti(c) -> list[int]:
    n = len(c)
    ranks = [d_matrix(c, k).rank() if k < n else 0 for k in range(n + 1)]
    return [sympy.binomial(n, k) - ranks[k] - (ranks[k - 1] if k else 0) for k in range(n + 1)]


def jacobi_ok(c) -> bool:
    n = len(c)
    for i, j, k in itertools.combinations(range(n), 3):
        e = lambda t: {t: 1}
        total: dict = {}
        for x, y, z in ((i, j, k), (j, k, i), (k, i, j)):
            for key, v in bracket(c, bracket(c, e(x), e(y)), e(z)).items():
                total[key] = total.get(key, 0) + v
        if any(v != 0 for v in total.values()):
            return False
    return True


def rank(rows) -> int:
    return sympy.Matrix(rows).rank() if rows else 0


def tensor(dim: int, brackets: dict) -> list:
    """``{(i, j): {k: c}}`` (0-based, i < j) to a full antisymmetric tensor."""
    c = [[[0] * dim for _ in range(dim)] for _ in range(dim)]
    for (i, j), row in brackets.items():
        for k, v in row.items():
            c[k][i][j] = sympy.nsimplify(v)
            c[k][j][i] = -sympy.nsimplify(v)
    return c
