"""Small constructors shared by the test modules (1-based indices)."""

from __future__ import annotations

from gkforge.dga import FormElement
from gkforge.liealg import LieAlgebra


def e(*idx: int, c=1) -> FormElement:
    return FormElement.monomial(tuple(i - 1 for i in idx), c)


def algebra(dim: int, *brackets: tuple) -> LieAlgebra:
    return LieAlgebra.from_entries(dim, [(i - 1, j - 1, k - 1, c) for i, j, k, c in brackets])


HEIS3 = algebra(3, (1, 2, 3, 1))
KT4 = algebra(4, (1, 2, 3, 1))


# ---------------------------------------------------------------- random structure constants

import random
from fractions import Fraction

import sympy

# (dim, [(i, j, k, c)]) 0-based; all satisfy Jacobi
KNOWN_LIE = [
    (2, [(0, 1, 1, 1)]),
    (3, [(0, 1, 2, 1)]),
    (3, [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)]),
    (3, [(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)]),
    (3, [(2, 0, 1, 1), (2, 1, 0, -1)]),
    (4, [(0, 1, 2, 1), (0, 2, 3, 1)]),
    (4, [(0, 1, 2, 1)]),
    (5, [(0, 1, 4, 1), (2, 3, 4, 1)]),
    (5, [(0, 1, 2, 1), (0, 2, 3, 1), (0, 3, 4, 1)]),
]


def tensor_from_entries(dim, entries):
    c = [[[sympy.Integer(0)] * dim for _ in range(dim)] for _ in range(dim)]
    for i, j, k, v in entries:
        c[k][i][j] += v
        c[k][j][i] -= v
    return c


def change_basis(c, P):
    """Structure constants in the basis ``f_a = sum_i P[i, a] e_i``."""
    n = len(c)
    Pinv = P.inv()
    out = [[[sympy.Integer(0)] * n for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            vec = [sum(P[i, a] * P[j, b] * c[k][i][j] for i in range(n) for j in range(n)) for k in range(n)]
            for t in range(n):
                out[t][a][b] = sum(Pinv[t, k] * vec[k] for k in range(n))
    return out


def random_structure(rng: random.Random, dim: int):
    """Either a disguised genuine Lie algebra or a sparse random antisymmetric tensor."""
    if rng.random() < 0.5:
        base = [kl for kl in KNOWN_LIE if kl[0] <= dim]
        d0, entries = rng.choice(base)
        c = tensor_from_entries(dim, entries)
        while True:
            P = sympy.Matrix(dim, dim, lambda i, j: rng.randint(-2, 2))
            if P.det() != 0:
                return change_basis(c, P)
    entries = []
    for _ in range(rng.randint(1, 4)):
        i, j = sorted(rng.sample(range(dim), 2))
        entries.append((i, j, rng.randrange(dim), sympy.Rational(rng.choice([-2, -1, 1, 2, 3]), rng.choice([1, 2]))))
    return tensor_from_entries(dim, entries)


def to_fraction_tensor(c):
    return [[[Fraction(str(x)) for x in row] for row in plane] for plane in c]
