"""Command-line front end.

Every command builds a report ``{schema, command, input, input_digest,
structure, verdicts, data}``.  Exit status is 0 when every verdict passes, 1
when one fails and 2 on input errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Any, Callable, Sequence

from . import __version__
from .catalog import CatalogEntry, builtin, builtin_names, load, serialize, to_document
from .courant import check_bracket_jacobi
from .dga import FormElement, massey_search, nonformality_witness, nilpotent_filtration
from .errors import CatalogError, GKForgeError, NotNilpotentError, StructureError
from .exactlin import Subspace
from .gcs import (
    GCStructure,
    canonical_line,
    check_gcs,
    check_hol_trivial,
    is_abelian_gcs,
    type_of,
    verify_eq3,
)
from .gk import (
    GKPair,
    check_gk,
    ddbar_lemma_check,
    delta_pm,
    formality_algebroid,
    gk_correspondence,
    intersection_dims,
    l1_bigrading,
    upq_decomposition,
)
from .liealg import ce_differential, check_jacobi, lower_central_series

SCHEMA = "gkforge/1"


class InputError(Exception):
    pass


class Report:
    def __init__(self, command: str):
        self.command = command
        self.input: str | None = None
        self.digest: str | None = None
        self.structure: str | None = None
        self.verdicts: list[dict] = []
        self.data: dict[str, Any] = {}
        self.lines: list[str] = []

    def verdict(self, check: str, passed: bool, details: str = "") -> bool:
        self.verdicts.append({"check": check, "pass": bool(passed), "details": details})
        return bool(passed)

    def note(self, line: str) -> None:
        self.lines.append(line)

    @property
    def ok(self) -> bool:
        return all(v["pass"] for v in self.verdicts)

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "input": self.input,
            "input_digest": self.digest,
            "structure": self.structure,
            "verdicts": self.verdicts,
            "data": self.data,
        }

    def render(self) -> str:
        head = f"{self.command}"
        if self.input:
            head += f"  input={self.input}"
        if self.structure:
            head += f"  structure={self.structure}"
        out = [head]
        for v in self.verdicts:
            tag = "PASS" if v["pass"] else "FAIL"
            out.append(f"  [{tag}] {v['check']}" + (f"  ({v['details']})" if v["details"] else ""))
        out.extend(f"  {line}" for line in self.lines)
        out.append("result: " + ("pass" if self.ok else "FAIL"))
        return "\n".join(out)


# ---------------------------------------------------------------- helpers


def _fmt(f: FormElement, symbol: str = "e") -> str:
    return f.format(symbol)


def _space_forms(S: Subspace, m: int) -> list[str]:
    return [_fmt(FormElement.from_vector(b, m)) for b in S.basis]


def _load(args, rep: Report) -> CatalogEntry:
    if not args.input:
        raise InputError("--input is required (a file path or builtin name)")
    try:
        entry = load(args.input)
    except CatalogError as exc:
        raise InputError(str(exc)) from None
    rep.input = args.input
    rep.digest = "sha256:" + hashlib.sha256(serialize(entry).encode("utf-8")).hexdigest()
    return entry


def _pick_structure(entry: CatalogEntry, args, rep: Report) -> GCStructure:
    name = args.structure or next(iter(entry.structures), None)
    if name is None:
        raise InputError(f"entry {entry.name!r} declares no generalized complex structures")
    if name not in entry.structures:
        raise InputError(f"entry {entry.name!r} has no structure {name!r}; available: {', '.join(entry.structures) or 'none'}")
    rep.structure = name
    return entry.structure(name)


def _pick_pair(entry: CatalogEntry, args, rep: Report) -> GKPair:
    name = args.structure or next(iter(entry.pairs), None)
    if name is None:
        raise InputError(f"entry {entry.name!r} declares no structure pairs")
    if name not in entry.pairs:
        raise InputError(f"entry {entry.name!r} has no pair {name!r}; available: {', '.join(entry.pairs) or 'none'}")
    rep.structure = name
    try:
        return entry.pair(name)
    except StructureError as exc:
        raise InputError(str(exc)) from None


def _gcs_valid(S: GCStructure, rep: Report) -> bool:
    ok = True
    for v in check_gcs(S).verdicts:
        ok &= rep.verdict(v.check, v.passed, v.details)
    return ok


def _expect(entry: CatalogEntry, key: str, name: str | None = None):
    val = entry.expected.get(key)
    if name is not None and isinstance(val, dict):
        return val.get(name)
    return val if name is None else None


# ---------------------------------------------------------------- lie


def cmd_lie_check(args, rep: Report) -> None:
    entry = _load(args, rep)
    g = entry.algebra
    jac = check_jacobi(g)
    rep.verdict(
        "Jacobi identity on all basis triples",
        jac.ok,
        "; ".join(f"triple e{i + 1},e{j + 1},e{k + 1}" for (i, j, k), _ in jac.failures[:5]),
    )
    try:
        ce_differential(g)
        d2 = True
    except GKForgeError:
        d2 = False
    rep.verdict("Chevalley-Eilenberg differential squares to zero", d2)
    rep.data["dim"] = g.dim
    rep.data["brackets"] = [[i + 1, j + 1, k + 1, str(c)] for i, j, k, c in g.entries()]
    rep.note(f"dim = {g.dim}, nonzero structure constants = {len(g.entries())}")
    if jac.ok:
        cs = lower_central_series(g)
        rep.data["lower_central_series"] = [S.dim for S in cs.series]
        rep.data["nilpotent"] = cs.is_nilpotent
        rep.data["step"] = cs.step
        rep.note(f"lower central series dims {[S.dim for S in cs.series]}; nilpotent: {cs.is_nilpotent}")
        if entry.twist:
            tw = check_bracket_jacobi(g, entry.twist)
            rep.verdict("twisted Courant bracket satisfies Jacobi on the double", tw.ok)
        if "nilpotent" in entry.expected:
            rep.verdict("nilpotency matches catalog expectation", cs.is_nilpotent == entry.expected["nilpotent"])


def cmd_lie_cohomology(args, rep: Report) -> None:
    entry = _load(args, rep)
    try:
        A = ce_differential(entry.algebra)
    except GKForgeError as exc:
        rep.verdict("Chevalley-Eilenberg differential squares to zero", False, str(exc))
        return
    rep.verdict("Chevalley-Eilenberg differential squares to zero", True)
    H = A.cohomology
    betti = list(H.betti)
    rep.data["betti"] = betti
    rep.data["euler_characteristic"] = H.euler_characteristic()
    if args.json:
        rep.data["representatives"] = {str(k): [_fmt(f) for f in H.representatives(k)] for k in range(entry.dim + 1)}
    rep.note("k     : " + " ".join(f"{k:>3}" for k in range(len(betti))))
    rep.note("b_k   : " + " ".join(f"{b:>3}" for b in betti))
    exp = _expect(entry, "betti")
    if exp is not None:
        rep.verdict("Betti numbers match catalog expectation", betti == list(exp), f"expected {list(exp)}")


def cmd_lie_filtration(args, rep: Report) -> None:
    entry = _load(args, rep)
    try:
        A = ce_differential(entry.algebra)
    except GKForgeError as exc:
        rep.verdict("Chevalley-Eilenberg differential squares to zero", False, str(exc))
        return
    try:
        filt = nilpotent_filtration(A)
    except NotNilpotentError as exc:
        rep.verdict("filtration by iterated kernels reaches the dual (nilpotent, minimal CE complex)", False, str(exc))
        rep.data["stalled_step"] = exc.stalled_step
        rep.data["stalled_dim"] = exc.stalled_dim
        return
    rep.verdict("filtration by iterated kernels reaches the dual (nilpotent, minimal CE complex)", True)
    rep.data["step_dims"] = [S.dim for S in filt.steps]
    rep.data["compatible_basis"] = [_fmt(b) for b in filt.compatible_basis]
    rep.data["differentials"] = [_fmt(A.d(b)) for b in filt.compatible_basis]
    rep.note(f"step dims {[S.dim for S in filt.steps]}")
    for b, db in zip(rep.data["compatible_basis"], rep.data["differentials"]):
        rep.note(f"d({b}) = {db}")


# ---------------------------------------------------------------- gcs


def cmd_gcs_check(args, rep: Report) -> None:
    entry = _load(args, rep)
    S = _pick_structure(entry, args, rep)
    if _gcs_valid(S, rep):
        rep.data["abelian"] = is_abelian_gcs(S)
        rep.note(f"i-eigenspace abelian: {rep.data['abelian']}")
        exp = _expect(entry, "abelian_gcs", rep.structure)
        if exp is not None:
            rep.verdict("abelian test matches catalog expectation", rep.data["abelian"] == exp)
        if rep.data["abelian"]:
            rep.verdict("abelian structure forces an abelian algebra", entry.algebra.is_abelian())


def cmd_gcs_type(args, rep: Report) -> None:
    entry = _load(args, rep)
    S = _pick_structure(entry, args, rep)
    if not _gcs_valid(S, rep):
        return
    t = type_of(S)
    rep.data["type"] = t
    rep.note(f"type = dim ker(anchor restricted to L) = {t}")
    exp = _expect(entry, "type", rep.structure)
    if exp is not None:
        rep.verdict("type matches catalog expectation", t == exp, f"expected {exp}")


def cmd_gcs_canonical(args, rep: Report) -> None:
    entry = _load(args, rep)
    S = _pick_structure(entry, args, rep)
    if not _gcs_valid(S, rep):
        return
    try:
        line = canonical_line(S)
    except StructureError as exc:
        rep.verdict("forms annihilated by L span a line", False, str(exc))
        return
    rep.verdict("forms annihilated by L span a line", True)
    rep.data["rho"] = _fmt(line.rho)
    rep.data["hol_trivial"] = check_hol_trivial(S)
    rep.note(f"rho = {rep.data['rho']}")
    rep.note(f"d_H rho = 0: {rep.data['hol_trivial']}")


def cmd_gcs_decompose(args, rep: Report) -> None:
    entry = _load(args, rep)
    S = _pick_structure(entry, args, rep)
    if not _gcs_valid(S, rep):
        return
    try:
        dec = S.decomposition
    except StructureError as exc:
        rep.verdict("U^k = wedge^(n-k) Lbar . rho give a direct sum of the forms", False, str(exc))
        return
    dims = dec.dims
    rep.verdict("U^k = wedge^(n-k) Lbar . rho give a direct sum of the forms", sum(dims.values()) == 2 ** S.m)
    rep.data["dims"] = {str(k): d for k, d in dims.items()}
    rep.note("U^k dims: " + ", ".join(f"k={k}: {d}" for k, d in dims.items()))
    try:
        ops = S.operators
        rep.verdict("d_H maps U^k into U^(k+1) + U^(k-1)", ops.integrable)
    except StructureError as exc:
        rep.verdict("d_H maps U^k into U^(k+1) + U^(k-1)", False, str(exc))
    if args.json:
        rep.data["bases"] = {str(k): _space_forms(U, S.m) for k, U in dec.levels.items()}


def cmd_gcs_eq3(args, rep: Report) -> None:
    entry = _load(args, rep)
    S = _pick_structure(entry, args, rep)
    if not _gcs_valid(S, rep):
        return
    if not rep.verdict("canonical generator is d_H-closed", check_hol_trivial(S)):
        return
    try:
        res = verify_eq3(S)
    except StructureError as exc:
        rep.verdict("delbar(alpha . rho) = (d_L alpha) . rho for all basis alpha", False, str(exc))
        return
    rep.verdict(
        "delbar(alpha . rho) = (d_L alpha) . rho for all basis alpha",
        res.ok,
        ("offending: " + ", ".join(res.offending[:5])) if res.offending else "",
    )
    rep.data["checked"] = res.checked
    rep.note(f"checked {res.checked} basis elements of wedge Lbar")


# ---------------------------------------------------------------- gk


def cmd_gk_check(args, rep: Report) -> None:
    entry = _load(args, rep)
    pair = _pick_pair(entry, args, rep)
    res = check_gk(pair.J1, pair.J2)
    for v in res.verdicts:
        rep.verdict(v.check, v.passed, v.details)
    if not res.ok:
        return
    dims = intersection_dims(pair)
    rep.data["dim_L1"] = dims.dim_L1
    rep.data["dim_L1_L2"] = dims.dim_L1_L2
    rep.data["dim_L1_L2bar"] = dims.dim_L1_L2bar
    rep.verdict("dim L1 = 2 dim(L1 & L2)", dims.ok, f"{dims.dim_L1} vs {dims.dim_L1_L2}")
    try:
        big = l1_bigrading(pair, seed=args.seed)
    except StructureError as exc:
        rep.verdict("J2 restricted to L1 is integrable (d_L1 = del + delbar)", False, str(exc))
        return
    rep.verdict("J2 restricted to L1 is integrable (d_L1 = del + delbar)", True)
    rep.verdict("del_L1 and delbar_L1 satisfy Leibniz on random pairs", big.leibniz_ok, f"seed {args.seed}, {big.leibniz_trials} trials")
    rep.verdict("del_L1, delbar_L1 square to zero and anticommute", big.squares_zero)
    rep.data["bigrading_dims"] = {f"{p},{q}": d for (p, q), d in sorted(big.dims.items())}
    rep.note(f"dim L1 = {dims.dim_L1}, dim(L1 & L2) = {dims.dim_L1_L2}, dim(L1 & L2bar) = {dims.dim_L1_L2bar}")


def cmd_gk_ddbar(args, rep: Report) -> None:
    entry = _load(args, rep)
    pair = _pick_pair(entry, args, rep)
    res = check_gk(pair.J1, pair.J2)
    if not rep.verdict("pair is generalized Kaehler", res.ok):
        return
    try:
        upq = upq_decomposition(pair)
    except StructureError as exc:
        rep.verdict("d_H maps U^{p,q} into the four corners U^{p+-1,q+-1}", False, str(exc))
        return
    rep.verdict("U^{p,q} give a direct sum of the forms", sum(upq.dims.values()) == 2 ** pair.m)
    rep.verdict("d_H maps U^{p,q} into the four corners U^{p+-1,q+-1}", True)
    ops = delta_pm(pair, upq)
    rep.verdict("delta_+ + delta_- = delbar_1", ops.sums_to_delbar)
    dd = ddbar_lemma_check(pair)
    rep.verdict("Im d+ & Ker d- = Im d- & Ker d+ = Im d+d-", dd.holds, "dims " + ", ".join(map(str, dd.dims)))
    rep.data["upq_dims"] = {f"{p},{q}": d for (p, q), d in upq.dims.items()}
    rep.data["subspace_dims"] = list(dd.dims)
    if args.json:
        m = pair.m
        rep.data["subspaces"] = {
            "im_plus_ker_minus": _space_forms(dd.im_plus_ker_minus, m),
            "im_minus_ker_plus": _space_forms(dd.im_minus_ker_plus, m),
            "im_plus_minus": _space_forms(dd.im_plus_minus, m),
        }
    rep.note(f"three subspaces have dims {dd.dims}")


def cmd_gk_correspondence(args, rep: Report) -> None:
    entry = _load(args, rep)
    pair = _pick_pair(entry, args, rep)
    res = check_gk(pair.J1, pair.J2)
    if not rep.verdict("pair is generalized Kaehler", res.ok):
        return
    if not rep.verdict("canonical generator of J1 is d_H-closed", check_hol_trivial(pair.J1)):
        return
    try:
        corr = gk_correspondence(pair, seed=args.seed)
    except StructureError as exc:
        rep.verdict("del_L1, delbar_L1 transported by rho match delta_+-", False, str(exc))
        return
    rep.verdict("(del_L1 + delbar_L1) alpha . rho = delbar_1 (alpha . rho)", corr.sum_identity)
    rep.verdict("del_L1, delbar_L1 transported by rho match delta_+- consistently", corr.pairing is not None, corr.pairing or "")
    rep.data["pairing"] = corr.pairing
    rep.data["checked"] = corr.checked
    rep.note(f"realized pairing: {corr.pairing}")


def _formality_data(rep: Report, fr) -> None:
    rep.data["verdict"] = fr.verdict
    rep.data["betti"] = list(fr.betti)
    rep.data["nilpotent"] = fr.nilpotent
    if fr.witness is not None:
        w = fr.witness
        rep.data["witness"] = {
            "found": w.found,
            "reason": w.reason,
            "basis": [_fmt(b, "l") for b in w.basis],
            "product_exact": w.product_exact,
            "volume_class_nonzero": w.volume_class_nonzero,
        }
    rep.data["massey"] = _massey_data(fr.massey, "l")
    rep.note(f"Betti numbers of (wedge Lbar1, d_L1): {list(fr.betti)}")
    rep.note(fr.verdict)


def cmd_gk_formality(args, rep: Report) -> None:
    entry = _load(args, rep)
    name = args.structure or next(iter(entry.pairs), None) or next(iter(entry.structures), None)
    if name is None:
        raise InputError(f"entry {entry.name!r} declares no structures")
    if name in entry.pairs:
        pair = _pick_pair(entry, args, rep)
        if not rep.verdict("pair is generalized Kaehler", check_gk(pair.J1, pair.J2).ok):
            return
        target = pair
        S = pair.J1
    else:
        args.structure = name
        S = _pick_structure(entry, args, rep)
        if not _gcs_valid(S, rep):
            return
        target = S
    if not rep.verdict("canonical generator is d_H-closed", check_hol_trivial(S)):
        return
    fr = formality_algebroid(target, args.max_degree)
    _formality_data(rep, fr)
    if isinstance(target, GKPair):
        rep.verdict("no formality obstruction on a generalized Kaehler pair", not fr.nonformal)
    if fr.witness is not None and fr.witness.found:
        rep.verdict("witness: b1^..^b(n-1) exact and volume class nonzero", fr.witness.product_exact and fr.witness.volume_class_nonzero)
    exp = _expect(entry, "algebroid_nonformal", name)
    if exp is not None:
        rep.verdict("formality verdict matches catalog expectation", fr.nonformal == exp)


# ---------------------------------------------------------------- dga


def _massey_data(ms, symbol: str = "e") -> dict:
    hits = []
    for (i, j, k), res in ms.nonvanishing:
        hits.append(
            {
                "positions": [i, j, k],
                "degrees": list(res.degrees),
                "representative": _fmt(res.representative, symbol),
                "class": [str(c) for c in res.representative_class],
                "indeterminacy_dim": res.indeterminacy.dim,
            }
        )
    return {"max_degree": ms.max_degree, "tried": ms.tried, "defined": ms.defined, "nonvanishing": hits}


def cmd_dga_massey(args, rep: Report) -> None:
    entry = _load(args, rep)
    try:
        A = ce_differential(entry.algebra)
    except GKForgeError as exc:
        rep.verdict("Chevalley-Eilenberg differential squares to zero", False, str(exc))
        return
    ms = massey_search(A, args.max_degree)
    H = A.cohomology
    reps = [f for k in (1, 2) if k <= A.n_gens for f in H.representatives(k)]
    data = _massey_data(ms)
    for hit, ((i, j, k), res) in zip(data["nonvanishing"], ms.nonvanishing):
        hit["triple"] = [_fmt(reps[i]), _fmt(reps[j]), _fmt(reps[k])]
    rep.data["massey"] = data
    recheck = all(
        not A.d(res.representative) and not res.indeterminacy.contains(res.representative_class)
        for _, res in ms.nonvanishing
    )
    rep.verdict("each reported triple is closed and outside its indeterminacy", recheck)
    rep.note(f"triples tried {ms.tried}, defined {ms.defined}, nonvanishing {len(ms.nonvanishing)} (max degree {ms.max_degree})")
    for hit in data["nonvanishing"][:5]:
        rep.note(f"<{', '.join(hit['triple'])}> = [{hit['representative']}]")
    exp = _expect(entry, "massey_obstruction")
    if exp is not None and args.max_degree is None:
        rep.verdict("Massey obstruction matches catalog expectation", ms.obstruction_found == exp)


def cmd_dga_witness(args, rep: Report) -> None:
    entry = _load(args, rep)
    try:
        A = ce_differential(entry.algebra)
        filt = nilpotent_filtration(A)
    except NotNilpotentError as exc:
        rep.verdict("CE complex is minimal (nilpotent algebra)", False, str(exc))
        return
    except GKForgeError as exc:
        rep.verdict("Chevalley-Eilenberg differential squares to zero", False, str(exc))
        return
    w = nonformality_witness(A, filt.compatible_basis)
    rep.data["basis"] = [_fmt(b) for b in w.basis]
    rep.data["product"] = _fmt(w.product) if w.product is not None else None
    rep.data["primitive"] = _fmt(w.primitive) if w.primitive is not None else None
    rep.data["volume"] = _fmt(w.volume) if w.volume is not None else None
    rep.data["product_exact"] = w.product_exact
    rep.data["volume_class_nonzero"] = w.volume_class_nonzero
    rep.verdict("witness: b1^..^b(n-1) exact and volume class nonzero", w.found, w.reason)
    if w.found:
        rep.note(f"{rep.data['product']} = d({rep.data['primitive']}), volume {rep.data['volume']} has nonzero class")


# ---------------------------------------------------------------- catalog


def cmd_catalog_list(args, rep: Report) -> None:
    rows = []
    for name in builtin_names():
        e = builtin(name)
        rows.append({"name": name, "dim": e.dim, "structures": e.structure_names()})
        rep.note(f"{name:<12} dim {e.dim}  structures: {', '.join(e.structure_names()) or '-'}")
    rep.data["entries"] = rows


def cmd_catalog_show(args, rep: Report) -> None:
    source = args.name or args.input
    if not source:
        raise InputError("catalog show needs an entry name")
    args.input = source
    entry = _load(args, rep)
    rep.data["entry"] = to_document(entry)
    rep.note(serialize(entry).rstrip("\n"))


COMMANDS: dict[str, dict[str, Callable]] = {
    "lie": {"check": cmd_lie_check, "cohomology": cmd_lie_cohomology, "filtration": cmd_lie_filtration},
    "gcs": {
        "check": cmd_gcs_check,
        "type": cmd_gcs_type,
        "canonical": cmd_gcs_canonical,
        "decompose": cmd_gcs_decompose,
        "eq3": cmd_gcs_eq3,
    },
    "gk": {
        "check": cmd_gk_check,
        "ddbar": cmd_gk_ddbar,
        "correspondence": cmd_gk_correspondence,
        "formality": cmd_gk_formality,
    },
    "dga": {"massey": cmd_dga_massey, "witness": cmd_dga_witness},
    "catalog": {"list": cmd_catalog_list, "show": cmd_catalog_show},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="entry file or builtin catalog name")
    common.add_argument("--structure", help="structure or pair name within the entry")
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--max-degree", type=int, default=None, help="Massey enumeration bound (default: dimension)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized property checks")
    parser = _Parser(prog="gkforge", description="Exact checks for generalized complex and Kaehler structures on Lie algebras.")
    parser.add_argument("--version", action="version", version=f"gkforge {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)
    for group, actions in COMMANDS.items():
        gp = groups.add_parser(group)
        sub = gp.add_subparsers(dest="action", required=True, parser_class=_Parser)
        for action in actions:
            ap = sub.add_parser(action, parents=[common])
            if (group, action) == ("catalog", "show"):
                ap.add_argument("name", nargs="?", help="builtin name or file")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.max_degree is not None and args.max_degree < 0:
        print("error: --max-degree must be non-negative", file=sys.stderr)
        return 2
    rep = Report(f"{args.group} {args.action}")
    try:
        COMMANDS[args.group][args.action](args, rep)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CatalogError, StructureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        sys.stdout.write(json.dumps(rep.to_json(), indent=2, ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(rep.render() + "\n")
    return 0 if rep.ok else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
