"""Command-line entry point: ``twistedconj <command> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Sequence

from .acgroup import ACGroupSpec, Family
from .automorphisms import InvalidAutomorphism, build_d4_family, check_conditions_d3f2
from .linalg import Matrix
from .makelist import make_list_canonical, parity, swap_note, verify_tables, witness_check
from .oracle import OracleError, oracle_compare_d3f2
from .reidemeister import (
    INFINITY,
    NotApplicable,
    ResidueClassSet,
    averaging_for,
    known_spectra,
    r_number_d3f2,
    rinfty_family_evidence,
    spectrum_d3f2,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

MATRIX_HELP = (
    "matrix entries row-major: a,b,c,d means [[a,b],[c,d]]. In the notation "
    "M = [[m1,m3],[m2,m4]] that is a=m1, b=m3, c=m2, d=m4; for example "
    "--M 0,1,1,3 is [[0,1],[1,3]], so m1=0, m2=1, m3=1, m4=3"
)

EPILOG = """examples:
  twistedconj makelist --k 0,0,0,1 --format md
  twistedconj verify --all
  twistedconj rnumber --family d3f2 --k 0,0,0,1 --M 0,1,1,3 --d 0,0
  twistedconj rnumber --family d4f5 --phi-m 2
  twistedconj spectrum --family d3f2 --k 1,1,1,1
  twistedconj rinfty --family d4f143 --sample 500 --seed 7
  twistedconj oracle --family d3f2 --k 0,0,0,1 --M 0,1,1,1 --d 0,0

--M 0,1,1,3 is the matrix [[0,1],[1,3]]: rows are given in order, so the
second entry is m3 and the third is m2 when M = [[m1,m3],[m2,m4]].
"""

# default parameters for the almost-Bieberbach members of the 4D families
_D4_DEFAULT_K = {Family.D4F3: (2, 0, 0, 1), Family.D4F5: (1, 0, 0, 1)}


class UsageError(Exception):
    pass


def _ints(text: str, n: int | None, what: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated integers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{what}: expected {n} integers, got {len(vals)}")
    return vals


def _matrix(text: str) -> Matrix:
    a, b, c, d = _ints(text, 4, "--M")
    return Matrix.of([[a, b], [c, d]])


def _r_json(R) -> int | str:
    return "infinity" if R is INFINITY else R


def _emit(doc, out) -> None:
    out.write(json.dumps(doc, indent=2) + "\n")


# -- commands ---------------------------------------------------------------------


def cmd_makelist(args, out) -> int:
    k = _ints(args.k, 4, "--k")
    used, rows = make_list_canonical(k)
    note = swap_note(k)
    if args.format == "json":
        doc = {"k": list(parity(k)), "rows": [r.to_json() for r in rows]}
        if note:
            doc["note"] = note
            doc["table"] = list(used)
        _emit(doc, out)
        return EXIT_OK
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["M", "d", "R"])
        for r in rows:
            w.writerow([_fmt_matrix(r.Mbar), _fmt_vec(r.dbar), str(r.progression)])
    else:
        out.write(f"MakeList{tuple(parity(k))}\n\n")
        out.write("| M | d | R |\n|---|---|---|\n")
        for r in rows:
            out.write(f"| {_fmt_matrix(r.Mbar)} | {_fmt_vec(r.dbar)} | {r.progression} |\n")
    if note:
        out.write(f"\nnote: {note}\n")
    return EXIT_OK


def _fmt_matrix(m: Matrix) -> str:
    return "[" + "; ".join(" ".join(str(x) for x in row) for row in m) + "]"


def _fmt_vec(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def cmd_verify(args, out) -> int:
    everything = args.all or not (args.tables or args.witnesses)
    do_tables = args.tables or everything
    do_witnesses = args.witnesses or everything
    directory = Path(args.golden_dir) if args.golden_dir else None
    ok = True
    if do_tables:
        rep = verify_tables(directory, parallel=args.parallel)
        ok &= rep["ok"]
        out.write(f"tables: {rep['tables'] - len(rep['diffs'])}/{rep['tables']} match "
                  f"({rep['rows']} golden rows)\n")
        for d in rep["diffs"]:
            key = "".join(str(x) for x in d["k"])
            if "error" in d:
                out.write(f"  {key}: {d['error']}\n")
            for row in d["missing"]:
                out.write(f"  {key}: golden row not produced {json.dumps(row)}\n")
            for row in d["extra"]:
                out.write(f"  {key}: computed row not in golden {json.dumps(row)}\n")
    if do_witnesses:
        rep = witness_check(directory=directory)
        ok &= rep["ok"]
        out.write(f"witnesses: {rep['rows']} rows x {rep['m_values']} values of m, "
                  f"{len(rep['findings'])} findings\n")
        for f in rep["findings"]:
            out.write(f"  {json.dumps(f)}\n")
    out.write("OK\n" if ok else "FAILED\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_rnumber(args, out) -> int:
    fam = Family.parse(args.family)
    if fam is Family.D3F2:
        if args.k is None or args.M is None:
            raise UsageError("d3f2 needs --k and --M")
        k = _ints(args.k, 4, "--k")
        M = _matrix(args.M)
        d = _ints(args.d, 2, "--d")
        conds = check_conditions_d3f2(k, M, d)
        try:
            R = r_number_d3f2(k, M, d)
        except InvalidAutomorphism as exc:
            _emit({"error": str(exc), "failed": list(exc.failed), "conditions": conds}, out)
            return EXIT_FAIL
        _emit({"R": _r_json(R), "method": "closed-form", "conditions": conds}, out)
        return EXIT_OK
    if fam not in (Family.D4F3, Family.D4F4, Family.D4F5):
        raise UsageError(f"rnumber supports d3f2, d4f3, d4f4 and d4f5, not {fam.value}")
    k = _ints(args.k, 4, "--k") if args.k else _D4_DEFAULT_K.get(fam)
    if k is None:
        raise UsageError(f"{fam.value} needs --k")
    spec = ACGroupSpec(fam, k)
    try:
        if args.finite:
            images = build_d4_family(spec, "finite")
        elif args.phi_m is not None:
            images = build_d4_family(spec, "phi_m", m=args.phi_m)
        else:
            if args.M is None:
                raise UsageError("give --M (with --d, --l), --phi-m or --finite")
            images = build_d4_family(spec, "generic", M=_matrix(args.M),
                                     d=_ints(args.d, 2, "--d"), l=args.l)
    except InvalidAutomorphism as exc:
        _emit({"error": str(exc), "failed": list(exc.failed)}, out)
        return EXIT_FAIL
    R = averaging_for(images)
    _emit({"R": _r_json(R), "method": "averaging",
           "conditions": {"relations": True, "bijective": True}}, out)
    return EXIT_OK


def _spectrum_for(fam: Family | str, k) -> tuple[ResidueClassSet, str]:
    known = known_spectra()
    # d4f1 has no group model here, only its known spectrum
    if fam == "d4f1":
        return known["d4f1"]["spectrum"], "literature"
    if fam is Family.D3F2:
        if k is None:
            raise UsageError("d3f2 needs --k")
        return spectrum_d3f2(k), "computed"
    if fam is Family.D3F1:
        return known["d3f1"]["spectrum"], "literature"
    if fam in (Family.D4F2, Family.D4F143, Family.D4F146):
        return ResidueClassSet([], True), "R-infinity (sampled evidence)"
    if k is None:
        raise UsageError(f"{fam.value} needs --k")
    k1, k2, k3, k4 = k
    if fam is Family.D4F3 and k1 % 2 == 0 and (k2, k3, k4) == (0, 0, 1):
        return ResidueClassSet([(4, 0)], True), "averaging"
    if fam is Family.D4F5 and (k2, k3, k4) == (0, 0, 1):
        return ResidueClassSet([(8, 0)], True), "averaging"
    if fam is Family.D4F4 and (k2, k3, k4) == (0, 0, 0):
        return known["d4f4 (k,0,0,0)"]["spectrum"], "literature"
    if fam is Family.D4F4 and k1 % 2 == 0 and (k2, k3, k4) == (1, 0, 0):
        return known["d4f4 (2k,1,0,0)"]["spectrum"], "literature"
    raise NotApplicable(f"no spectrum available for {fam.value} with parameters {tuple(k)}")


def cmd_spectrum(args, out) -> int:
    fam = args.family if args.family == "d4f1" else Family.parse(args.family)
    k = _ints(args.k, 4, "--k") if args.k else None
    try:
        spec, source = _spectrum_for(fam, k)
    except NotApplicable as exc:
        _emit({"error": str(exc)}, out)
        return EXIT_FAIL
    doc = spec.to_json()
    doc["source"] = source
    _emit(doc, out)
    return EXIT_OK


def cmd_rinfty(args, out) -> int:
    try:
        rep = rinfty_family_evidence(args.family, args.sample, args.seed)
    except NotApplicable as exc:
        _emit({"error": str(exc)}, out)
        return EXIT_FAIL
    _emit(rep.to_json(), out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_oracle(args, out) -> int:
    if Family.parse(args.family) is not Family.D3F2:
        raise UsageError("the finite-quotient oracle is implemented for d3f2 only")
    k = _ints(args.k, 4, "--k")
    M = _matrix(args.M)
    d = _ints(args.d, 2, "--d")
    try:
        rep = oracle_compare_d3f2(k, M, d, max_order=args.max_order)
    except (InvalidAutomorphism, OracleError) as exc:
        _emit({"error": str(exc)}, out)
        return EXIT_FAIL
    _emit(rep.to_json(), out)
    return EXIT_OK if rep.ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    families = [f.value for f in Family]
    p = argparse.ArgumentParser(
        prog="twistedconj",
        description="Reidemeister numbers and spectra of low-dimensional "
                    "almost-crystallographic groups.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("makelist", help="candidate Reidemeister sets for a D3F2 parity class")
    s.add_argument("--k", required=True, help="k1,k2,k3,k4 (reduced mod 2)")
    s.add_argument("--format", choices=("json", "csv", "md"), default="json")
    s.set_defaults(func=cmd_makelist)

    s = sub.add_parser("verify", help="compare against the shipped golden data")
    s.add_argument("--tables", action="store_true")
    s.add_argument("--witnesses", action="store_true")
    s.add_argument("--all", action="store_true")
    s.add_argument("--parallel", type=int, default=1, metavar="N")
    s.add_argument("--golden-dir", help="override the golden data directory")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("rnumber", help="Reidemeister number of one automorphism",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--family", required=True, choices=families)
    s.add_argument("--k", help="k1,k2,k3,k4")
    s.add_argument("--M", help=MATRIX_HELP)
    s.add_argument("--d", default="0,0", help="d1,d2")
    s.add_argument("--l", type=int, default=0, help="free e1 exponent (4D families)")
    s.add_argument("--phi-m", type=int, dest="phi_m", metavar="M",
                   help="use the one-parameter family phi_m (d4f3, d4f5)")
    s.add_argument("--finite", action="store_true",
                   help="use the finite-R automorphism every group of families 3-5 has")
    s.set_defaults(func=cmd_rnumber)

    s = sub.add_parser("spectrum", help="Reidemeister spectrum of a family")
    s.add_argument("--family", required=True, choices=families + ["d4f1"])
    s.add_argument("--k", help="k1,k2,k3,k4")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("rinfty", help="sample automorphisms of an R-infinity family")
    s.add_argument("--family", required=True, choices=("d4f2", "d4f143", "d4f146"))
    s.add_argument("--sample", type=int, default=1000, metavar="N")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_rinfty)

    s = sub.add_parser("oracle", help="brute-force count on finite quotients",
                       epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    s.add_argument("--family", required=True, choices=families)
    s.add_argument("--k", required=True)
    s.add_argument("--M", required=True, help=MATRIX_HELP)
    s.add_argument("--d", default="0,0")
    s.add_argument("--max-order", type=int, default=20000, dest="max_order")
    s.set_defaults(func=cmd_oracle)
    return p


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"twistedconj {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Run the CLI in-process, returning (exit code, stdout); usage errors give code 2."""
    buf = io.StringIO()
    try:
        code = main(argv, buf)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
