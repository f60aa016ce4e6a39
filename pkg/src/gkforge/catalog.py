"""Built-in examples and the JSON entry format.

An entry file is one JSON object::

    {
      "name": "kt4",
      "dim": 4,
      "brackets": [{"i": 1, "j": 2, "k": 3, "c": "1"}],
      "H": [{"i": 1, "j": 2, "k": 4, "c": "1"}],
      "structures": {"symp": {"J": [["0", ...], ...]}, "kahler": {"pair": ["a", "b"]}},
      "expected": {...}
    }

Indices are 1-based.  A bracket record means ``[e_i, e_j]`` contains ``c e_k``;
an H record means ``H`` contains ``c e^i ^ e^j ^ e^k``.  Scalars are strings
such as ``"3/4"`` or ``"1/2+3 i"``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Any

from .courant import check_twist
from .dga import FormElement
from .errors import CatalogError, DifferentialError, TwistNotClosedError
from .exactlin import C, Matrix
from .gcs import GCStructure, b_transform, complex_gcs, symplectic_gcs
from .gk import GKPair
from .liealg import LieAlgebra

__all__ = ["CatalogEntry", "builtin", "builtin_names", "parse", "serialize", "load", "SCHEMA_KEYS"]

SCHEMA_KEYS = ("name", "dim", "brackets", "H", "structures", "expected")


@dataclass(eq=False)
class CatalogEntry:
    name: str
    algebra: LieAlgebra
    twist: FormElement = field(default_factory=FormElement)
    structures: dict[str, Matrix] = field(default_factory=dict)
    pairs: dict[str, tuple[str, str]] = field(default_factory=dict)
    expected: dict[str, Any] = field(default_factory=dict)
    _built: dict[str, GCStructure] = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def structure_names(self) -> list[str]:
        return list(self.structures) + list(self.pairs)

    def structure(self, name: str) -> GCStructure:
        if name not in self.structures:
            raise CatalogError(f"entry {self.name!r} has no structure {name!r}; available: {', '.join(self.structures) or 'none'}")
        S = self._built.get(name)
        if S is None or S.J != self.structures[name]:
            S = GCStructure(self.algebra, self.structures[name], self.twist, name)
            self._built[name] = S
        return S

    def pair(self, name: str) -> GKPair:
        if name not in self.pairs:
            raise CatalogError(f"entry {self.name!r} has no pair {name!r}; available: {', '.join(self.pairs) or 'none'}")
        a, b = self.pairs[name]
        return GKPair(self.structure(a), self.structure(b), name)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CatalogEntry):
            return NotImplemented
        return (
            self.name == other.name
            and self.algebra == other.algebra
            and self.twist == other.twist
            and self.structures == other.structures
            and self.pairs == other.pairs
            and self.expected == other.expected
        )

    def __hash__(self) -> int:
        return hash(serialize(self))


# ---------------------------------------------------------------- builtins


def _e(*idx: int) -> FormElement:
    return FormElement.monomial(tuple(i - 1 for i in idx), 1)


def _standard_J0(m: int) -> Matrix:
    """``J0 e_(2k-1) = e_(2k)``, ``J0 e_(2k) = -e_(2k-1)``."""
    rows = [[0] * m for _ in range(m)]
    for k in range(0, m, 2):
        rows[k + 1][k] = 1
        rows[k][k + 1] = -1
    return Matrix(rows)


def _standard_omega(m: int) -> FormElement:
    out = FormElement()
    for k in range(0, m, 2):
        out = out + FormElement.monomial((k, k + 1), 1)
    return out


def _algebra(dim: int, brackets: list[tuple[int, int, int, int]]) -> LieAlgebra:
    return LieAlgebra.from_entries(dim, [(i - 1, j - 1, k - 1, c) for i, j, k, c in brackets])


def _abelian(m: int) -> CatalogEntry:
    g = LieAlgebra.abelian(m)
    entry = CatalogEntry(f"ab{m}", g, expected={"betti": [comb(m, k) for k in range(m + 1)], "nilpotent": True, "massey_obstruction": False})
    if m % 2 == 0:
        entry.structures["cplx"] = complex_gcs(g, _standard_J0(m)).J
        entry.structures["symp"] = symplectic_gcs(g, _standard_omega(m)).J
        entry.expected.update({"type": {"cplx": m // 2, "symp": 0}, "abelian_gcs": {"cplx": True, "symp": True}})
    return entry


def _heis3() -> CatalogEntry:
    g = _algebra(3, [(1, 2, 3, 1)])
    return CatalogEntry("heis3", g, expected={"betti": [1, 2, 2, 1], "nilpotent": True, "nonformal": True, "massey_obstruction": True})


def _heis3_r() -> CatalogEntry:
    g = _algebra(4, [(1, 2, 3, 1)])
    entry = CatalogEntry("heis3_r", g)
    entry.structures["symp"] = symplectic_gcs(g, _e(1, 4) + _e(2, 3)).J
    entry.expected = {
        "betti": [1, 3, 4, 3, 1],
        "nilpotent": True,
        "massey_obstruction": True,
        "nonformal": True,
        "type": {"symp": 0},
        "abelian_gcs": {"symp": False},
        "algebroid_nonformal": {"symp": True},
    }
    return entry


def _kt4() -> CatalogEntry:
    g = _algebra(4, [(1, 2, 3, 1)])
    entry = CatalogEntry("kt4", g)
    entry.structures["symp"] = symplectic_gcs(g, _e(1, 3) + _e(2, 4)).J
    entry.structures["cplx"] = complex_gcs(g, _standard_J0(4)).J
    entry.expected = {
        "betti": [1, 3, 4, 3, 1],
        "nilpotent": True,
        "massey_obstruction": True,
        "nonformal": True,
        "type": {"symp": 0, "cplx": 2},
        "abelian_gcs": {"symp": False, "cplx": False},
        "algebroid_nonformal": {"symp": True, "cplx": True},
    }
    return entry


def _kt4_twisted() -> CatalogEntry:
    g = _algebra(4, [(1, 2, 3, 1)])
    B = -_e(3, 4)  # dB = e1^e2^e4
    symp = b_transform(symplectic_gcs(g, _e(1, 3) + _e(2, 4)), B)
    cplx = b_transform(complex_gcs(g, _standard_J0(4)), B)
    entry = CatalogEntry("kt4_twisted", g, twist=symp.twist)
    entry.structures["symp_B"] = symp.J
    entry.structures["cplx_B"] = cplx.J
    entry.expected = {
        "betti": [1, 3, 4, 3, 1],
        "nilpotent": True,
        "massey_obstruction": True,
        "type": {"symp_B": 0, "cplx_B": 2},
        "abelian_gcs": {"symp_B": False, "cplx_B": False},
    }
    return entry


def _t4kahler() -> CatalogEntry:
    g = LieAlgebra.abelian(4)
    entry = CatalogEntry("t4kahler", g)
    entry.structures["cplx"] = complex_gcs(g, _standard_J0(4)).J
    entry.structures["symp"] = symplectic_gcs(g, _standard_omega(4)).J
    entry.pairs["kahler"] = ("cplx", "symp")
    entry.expected = {
        "betti": [1, 4, 6, 4, 1],
        "nilpotent": True,
        "massey_obstruction": False,
        "type": {"cplx": 2, "symp": 0},
        "abelian_gcs": {"cplx": True, "symp": True},
        "gk": {"kahler": True},
        "intersection": {"kahler": [4, 2]},
        "algebroid_nonformal": {"cplx": False, "symp": False},
    }
    return entry


def _e2r_kahler() -> CatalogEntry:
    # Euclidean motions of the plane times R: [e3, e1] = e2, [e3, e2] = -e1
    g = _algebra(4, [(3, 1, 2, 1), (3, 2, 1, -1)])
    entry = CatalogEntry("e2r_kahler", g)
    entry.structures["symp"] = symplectic_gcs(g, _standard_omega(4)).J
    entry.structures["cplx"] = complex_gcs(g, _standard_J0(4)).J
    entry.pairs["kahler"] = ("symp", "cplx")
    entry.expected = {
        "betti": [1, 2, 2, 2, 1],
        "nilpotent": False,
        "massey_obstruction": False,
        "type": {"symp": 0, "cplx": 2},
        "abelian_gcs": {"symp": False, "cplx": False},
        "gk": {"kahler": True},
        "intersection": {"kahler": [4, 2]},
        "algebroid_nonformal": {"symp": False},
    }
    return entry


_BUILDERS = {
    "ab2": lambda: _abelian(2),
    "ab3": lambda: _abelian(3),
    "ab4": lambda: _abelian(4),
    "ab5": lambda: _abelian(5),
    "ab6": lambda: _abelian(6),
    "heis3": _heis3,
    "heis3_r": _heis3_r,
    "kt4": _kt4,
    "kt4_twisted": _kt4_twisted,
    "t4kahler": _t4kahler,
    "e2r_kahler": _e2r_kahler,
}


def builtin_names() -> list[str]:
    return list(_BUILDERS)


@lru_cache(maxsize=None)
def builtin(name: str) -> CatalogEntry:
    try:
        build = _BUILDERS[name]
    except KeyError:
        raise CatalogError(f"unknown catalog entry {name!r}; available: {', '.join(_BUILDERS)}") from None
    return build()


# ---------------------------------------------------------------- file format


def _fail(path: str, msg: str) -> CatalogError:
    return CatalogError(f"{path}: {msg}")


def _scalar(raw: Any, path: str) -> C:
    if isinstance(raw, bool) or not isinstance(raw, (str, int)):
        raise _fail(path, f"expected a rational string, got {raw!r}")
    try:
        return C.parse(str(raw))
    except (ValueError, ZeroDivisionError) as exc:
        raise _fail(path, f"malformed scalar {raw!r} ({exc})") from None


def _index(rec: dict, key: str, dim: int, path: str) -> int:
    v = rec.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise _fail(f"{path}.{key}", f"expected an integer index, got {v!r}")
    if not 1 <= v <= dim:
        raise _fail(f"{path}.{key}", f"index {v} out of range 1..{dim}")
    return v - 1


def _records(doc: dict, key: str) -> list:
    recs = doc.get(key, [])
    if not isinstance(recs, list):
        raise _fail(key, "expected a list")
    for n, r in enumerate(recs):
        if not isinstance(r, dict):
            raise _fail(f"{key}[{n}]", "expected an object with i, j, k, c")
    return recs


def parse(text: str) -> CatalogEntry:
    """Parse one entry; every failure names the offending field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogError(f"line {exc.lineno}, column {exc.colno}: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict):
        raise CatalogError("top level must be a JSON object")
    unknown = sorted(set(doc) - set(SCHEMA_KEYS))
    if unknown:
        raise CatalogError(f"unknown field(s): {', '.join(unknown)}")
    dim = doc.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise _fail("dim", f"expected a positive integer, got {dim!r}")
    name = doc.get("name", "unnamed")
    if not isinstance(name, str):
        raise _fail("name", "expected a string")

    entries = []
    for n, r in enumerate(_records(doc, "brackets")):
        path = f"brackets[{n}]"
        i, j, k = (_index(r, key, dim, path) for key in "ijk")
        entries.append((i, j, k, _scalar(r.get("c"), f"{path}.c")))
    try:
        g = LieAlgebra.from_entries(dim, entries)
    except CatalogError as exc:
        raise _fail("brackets", str(exc)) from None

    H = FormElement()
    for n, r in enumerate(_records(doc, "H")):
        path = f"H[{n}]"
        idx = tuple(_index(r, key, dim, path) for key in "ijk")
        if len(set(idx)) < 3:
            raise _fail(path, f"repeated index in {tuple(x + 1 for x in idx)}")
        H = H + FormElement.monomial(idx, _scalar(r.get("c"), f"{path}.c"))
    try:
        check_twist(g, H)
    except TwistNotClosedError as exc:
        raise _fail("H", f"twist is not closed: {exc}") from None
    except DifferentialError as exc:
        raise _fail("H", f"closedness cannot be checked because the brackets fail Jacobi ({exc})") from None

    entry = CatalogEntry(name, g, H)
    structs = doc.get("structures", {})
    if not isinstance(structs, dict):
        raise _fail("structures", "expected an object")
    for sname, spec in structs.items():
        path = f"structures.{sname}"
        if not isinstance(spec, dict) or len(spec) != 1 or not ({"J", "pair"} & set(spec)):
            raise _fail(path, 'expected {"J": matrix} or {"pair": [name, name]}')
        if "J" in spec:
            entry.structures[sname] = _parse_matrix(spec["J"], 2 * dim, f"{path}.J")
        else:
            pr = spec["pair"]
            if not (isinstance(pr, list) and len(pr) == 2 and all(isinstance(x, str) for x in pr)):
                raise _fail(f"{path}.pair", "expected two structure names")
            entry.pairs[sname] = (pr[0], pr[1])
    for sname, (a, b) in entry.pairs.items():
        for x in (a, b):
            if x not in entry.structures:
                raise _fail(f"structures.{sname}.pair", f"unknown structure {x!r}")
    expected = doc.get("expected", {})
    if not isinstance(expected, dict):
        raise _fail("expected", "expected an object")
    entry.expected = expected
    return entry


def _parse_matrix(raw: Any, size: int, path: str) -> Matrix:
    if not isinstance(raw, list) or len(raw) != size:
        raise _fail(path, f"expected {size} rows")
    rows = []
    for r, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != size:
            raise _fail(f"{path}[{r}]", f"expected {size} entries")
        vals = [_scalar(x, f"{path}[{r}][{c}]") for c, x in enumerate(row)]
        for c, v in enumerate(vals):
            if not v.is_real():
                raise _fail(f"{path}[{r}][{c}]", "J must have real entries")
        rows.append(vals)
    return Matrix(rows)


def to_document(entry: CatalogEntry) -> dict:
    brackets = [{"i": i + 1, "j": j + 1, "k": k + 1, "c": str(c)} for i, j, k, c in entry.algebra.entries()]
    H = [
        {"i": idx[0] + 1, "j": idx[1] + 1, "k": idx[2] + 1, "c": str(c)}
        for idx, c in entry.twist.sorted_terms()
    ]
    structures: dict[str, Any] = {}
    for sname, J in entry.structures.items():
        structures[sname] = {"J": [[str(x) for x in row] for row in J.data]}
    for sname, (a, b) in entry.pairs.items():
        structures[sname] = {"pair": [a, b]}
    return {
        "name": entry.name,
        "dim": entry.dim,
        "brackets": brackets,
        "H": H,
        "structures": structures,
        "expected": entry.expected,
    }


def serialize(entry: CatalogEntry) -> str:
    return json.dumps(to_document(entry), indent=2, ensure_ascii=False) + "\n"


def load(source: str) -> CatalogEntry:
    """A builtin name, or a path to an entry file."""
    if source in _BUILDERS:
        return builtin(source)
    if not os.path.exists(source) and not source.endswith(".json") and os.sep not in source:
        raise CatalogError(f"unknown catalog entry {source!r}; available: {', '.join(_BUILDERS)}")
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CatalogError(f"cannot read {source!r}: {exc.strerror}; builtin names: {', '.join(_BUILDERS)}") from None
    return parse(text)
