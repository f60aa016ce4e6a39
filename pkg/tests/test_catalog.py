import json
import os

import pytest

from gkforge.catalog import builtin, builtin_names, load, parse, serialize
from gkforge.courant import check_bracket_jacobi
from gkforge.errors import CatalogError
from gkforge.gcs import check_gcs, complex_gcs, is_abelian_gcs, type_of
from gkforge.gk import check_gk, intersection_dims
from gkforge.liealg import ce_differential, check_jacobi, filtration, lower_central_series
from gkforge.exactlin import Matrix

FIX = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture(name):
    return os.path.join(FIX, name)


def test_heis3():
    e = builtin("heis3")
    assert e.dim == 3 and len(e.algebra.entries()) == 1


def test_unknown_lists_names():
    with pytest.raises(CatalogError) as info:
        builtin("nope")
    assert "t4kahler" in str(info.value)


@pytest.mark.parametrize("name", builtin_names())
def test_roundtrip(name):
    e = builtin(name)
    text = serialize(e)
    assert parse(text) == e
    assert serialize(parse(text)) == text


@pytest.mark.parametrize("name", builtin_names())
def test_expected_verdicts(name):
    e = builtin(name)
    g = e.algebra
    assert check_jacobi(g).ok
    assert check_bracket_jacobi(g, e.twist).ok
    exp = e.expected
    assert list(ce_differential(g).cohomology.betti) == exp["betti"]
    assert lower_central_series(g).is_nilpotent == exp["nilpotent"]
    if exp["nilpotent"]:
        filtration(g)
    for s in e.structures:
        S = e.structure(s)
        assert check_gcs(S).ok
        assert type_of(S) == exp["type"][s]
        assert is_abelian_gcs(S) == exp["abelian_gcs"][s]
    for p in e.pairs:
        P = e.pair(p)
        assert check_gk(P.J1, P.J2).ok == exp["gk"][p]
        d = intersection_dims(P)
        assert [d.dim_L1, d.dim_L1_L2] == exp["intersection"][p]


def test_kt4_structures():
    e = builtin("kt4")
    assert e.structure("cplx").J == complex_gcs(e.algebra, Matrix([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])).J


def test_load_file_and_name(tmp_path):
    p = tmp_path / "kt4.json"
    p.write_text(serialize(builtin("kt4")), encoding="utf-8")
    assert load(str(p)) == load("kt4")


@pytest.mark.parametrize(
    "name,match",
    [
        ("nonclosed_h.json", r"H: twist is not closed"),
        ("antisymmetry.json", r"brackets: .*not antisymmetric"),
        ("repeated_h.json", r"H\[0\]: repeated index"),
        ("bad_rational.json", r"brackets\[0\]\.c: malformed scalar"),
        ("out_of_range.json", r"brackets\[0\]\.j: index 4 out of range"),
        ("broken.json", r"line \d+, column \d+"),
    ],
)
def test_diagnostics(name, match):
    with pytest.raises(CatalogError, match=match):
        load(fixture(name))


def test_rejects_unknown_fields():
    with pytest.raises(CatalogError, match="unknown field"):
        parse(json.dumps({"dim": 2, "bracket": []}))


def test_rejects_bad_matrix_shape():
    doc = {"dim": 2, "structures": {"x": {"J": [["0", "1"], ["1", "0"]]}}}
    with pytest.raises(CatalogError, match=r"structures\.x\.J"):
        parse(json.dumps(doc))


def test_rejects_unknown_pair_member():
    doc = {"dim": 2, "structures": {"p": {"pair": ["a", "b"]}}}
    with pytest.raises(CatalogError, match="unknown structure"):
        parse(json.dumps(doc))


def test_rejects_complex_J():
    row = ["0"] * 4
    doc = {"dim": 2, "structures": {"x": {"J": [["i"] + row[1:]] + [row] * 3}}}
    with pytest.raises(CatalogError, match="real entries"):
        parse(json.dumps(doc))


def test_non_jacobi_file_parses():
    e = load(fixture("not_jacobi.json"))
    assert not check_jacobi(e.algebra).ok


def test_non_integrable_file():
    e = load(fixture("non_integrable.json"))
    rep = check_gcs(e.structure("acs"))
    assert not rep.ok and rep.verdicts[2].passed
