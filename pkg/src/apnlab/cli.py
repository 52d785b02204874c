"""Command-line interface: ``apnlab construct|analyze|verify|orbit|equiv``.

Exit codes: 0 success, 1 verification failure, 2 usage or parameter
error, 3 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from collections import Counter
from pathlib import Path

from apnlab import report
from apnlab.equivalence import (
    EquivalenceError,
    LinearEquivalence,
    build_alpha_equivalence,
    certify_classes,
    inverse_sigma_equivalence,
    verify_el_equivalence_witness,
)
from apnlab.functions import (
    FamilyParams,
    ParameterError,
    TableFormatError,
    build_family_new,
    build_family_orig,
    check_exponent,
    format_table,
    read_table,
    smallest_admissible,
)
from apnlab.gf2m import get_field
from apnlab.group_action import SearchTooLargeError, f_poly, group_order, orbit, stabilizer_f
from apnlab.verify import CHECKS, PlanError, VerifyPlan, run_plan

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("apnlab")


def parse_range(text: str) -> list[int]:
    """'3..5' -> [3, 4, 5]; '3,5' -> [3, 5]; '4' -> [4]."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return sorted(set(out))


def _range_arg(text: str) -> list[int]:
    try:
        return parse_range(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None


def _hex(text: str) -> int:
    try:
        return int(text, 16)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a hex value: {text!r}") from None


def _apply_field_polys(specs: list[str] | None, default_m: int | None = None) -> None:
    for spec in specs or []:
        m_part, sep, poly = spec.rpartition(":")
        if sep:
            m = int(m_part)
        elif default_m is not None:
            m, poly = default_m, spec
        else:
            raise ParameterError("--field-poly needs the form M:HEX here")
        os.environ[f"APNLAB_FIELD_POLY_{m}"] = poly


def _params(args) -> FamilyParams:
    K = get_field(args.m)
    check_exponent(K, args.k)
    alpha = smallest_admissible(K, args.k) if args.alpha == "auto" else _hex(args.alpha)
    p = FamilyParams(K, args.k, alpha)
    p.validate()
    return p


def cmd_construct(args) -> int:
    _apply_field_polys(args.field_poly, args.m)
    if args.orig:
        F = build_family_orig(get_field(args.m), args.k)
    else:
        F = build_family_new(_params(args))
    text = format_table(F)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
        print(f"wrote {F.size} entries to {args.output} (m={F.m} k={F.k} alpha={F.alpha:#x})", file=sys.stderr)
    return EXIT_OK


def cmd_analyze(args) -> int:
    F = read_table(args.table)
    _apply_field_polys(args.field_poly, F.m)
    which = [a for a in report.ANALYSES if getattr(args, a) or args.all]
    if not which:
        which = ["apn", "image", "degree"]
    rep = report.analyze_table(F, which, get_field(F.m))
    if args.csv:
        out = Path(args.csv)
        out.mkdir(parents=True, exist_ok=True)
        if "differential_spectrum" in rep:
            (out / "differential_spectrum.csv").write_text(report.spectrum_csv(rep["differential_spectrum"], "delta"))
        if "walsh" in rep:
            (out / "walsh_abs.csv").write_text(report.spectrum_csv(rep["walsh"]["abs_counts"], "abs_walsh"))
        od = rep.get("ortho_derivative_spectrum")
        if od and "error" not in od:
            (out / "ortho_derivative_spectrum.csv").write_text(report.spectrum_csv(od, "delta"))
    if args.json:
        sys.stdout.write(report.to_json(rep))
    else:
        print("\n".join(report.summary_lines(rep)))
    return EXIT_OK


def cmd_verify(args) -> int:
    _apply_field_polys(args.field_poly)
    checks = list(CHECKS) if args.checks == "all" else [c.strip() for c in args.checks.split(",") if c.strip()]
    ks = None if args.k == "all" else parse_range(args.k)
    plan = VerifyPlan(args.m, ks, checks, strict=args.checks != "all")
    results, skipped = run_plan(plan, jobs=args.jobs, corrupt=args.inject_fault)
    passed = all(r.passed for r in results) and bool(results)
    if args.json:
        sys.stdout.write(report.to_json({
            "passed": passed,
            "results": [r.as_dict() for r in results],
            "skipped": [{"check": c, "m": m} for c, m in skipped],
            "convention": {str(m): report.convention(get_field(m)) for m in args.m},
        }))
    else:
        for r in results:
            extra = ""
            if r.check == "walsh":
                d = r.details
                extra = (f" top={d['top_count']} (literature {d['top_count_literature']}: "
                         f"{'agree' if d['top_count_agrees_with_literature'] else 'disagree'})")
            elif r.check == "class-count":
                extra = f" classes={r.details['classes']} expected={r.details['expected']}"
            print(f"[{'PASS' if r.passed else 'FAIL'}] criterion {r.criterion:2d} {r.check:<13} m={r.m} "
                  f"instances={r.instances}{extra}")
        for c, m in skipped:
            print(f"[SKIP] {c} m={m} (outside desk-scale bounds)")
        print(f"summary: {sum(r.passed for r in results)}/{len(results)} passed")
    return EXIT_OK if passed else EXIT_FAIL


def cmd_orbit(args) -> int:
    _apply_field_polys(args.field_poly, args.m)
    p = _params(args)
    f = f_poly(p)
    stab = stabilizer_f(f)
    per_det = Counter(g.M.det for g in stab)
    orb = orbit(f)
    total = group_order(args.m)
    out = {
        "m": args.m, "k": args.k, "alpha": f"{p.alpha:#x}",
        "stabilizer_size": len(stab),
        "expected_stabilizer_size": 3 * ((1 << args.m) - 1),
        "per_determinant": sorted(set(per_det.values())),
        "orbit_size": len(orb),
        "group_order": total,
        "orbit_stabilizer_consistent": len(orb) * len(stab) == total,
    }
    sys.stdout.write(report.to_json(out))
    ok = out["orbit_stabilizer_consistent"] and len(stab) == out["expected_stabilizer_size"]
    return EXIT_OK if ok else EXIT_FAIL


def cmd_equiv(args) -> int:
    if args.mode == "check":
        F, G = read_table(args.table_f), read_table(args.table_g)
        w = LinearEquivalence.from_text(Path(args.witness).read_text())
        ok = verify_el_equivalence_witness(F, G, w)
        print(f"witness verifies: {str(ok).lower()}")
        return EXIT_OK if ok else EXIT_FAIL
    _apply_field_polys(args.field_poly, args.m)
    K = get_field(args.m)
    if args.mode == "classes":
        cert = certify_classes(K)
        out = {
            "m": args.m,
            "classes": cert.classes,
            "expected": cert.expected,
            "representatives": {k: f"{p.alpha:#x}" for k, p in cert.representatives.items()},
            "verdicts": [{"k1": a, "k2": b, "status": v.status.value, "invariant": v.invariant}
                         for (a, b), v in sorted(cert.verdicts.items())],
            "ortho_derivative_spectra": {k: dict(s) for k, s in cert.spectra.items()},
        }
        sys.stdout.write(report.to_json(out))
        return EXIT_OK if cert.num_classes == cert.expected and not cert.undecided else EXIT_FAIL
    if args.mode == "alpha":
        p1 = FamilyParams(K, args.k, _hex(args.alpha1))
        p2 = FamilyParams(K, args.k, _hex(args.alpha2))
        p1.validate()
        p2.validate()
        w = build_alpha_equivalence(p1, p2)
    else:
        args.alpha = args.alpha or "auto"
        w = inverse_sigma_equivalence(_params(args))
    text = w.to_text()
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
        print(f"witness verified and written to {args.output}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="apnlab", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def field_poly(p):
        p.add_argument("--field-poly", action="append", metavar="[M:]HEX",
                       help="reduction polynomial override (also APNLAB_FIELD_POLY_<m>)")

    def family(p, alpha=True):
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--k", type=int, required=True)
        if alpha:
            p.add_argument("--alpha", default="auto", help="hex value or 'auto' (smallest admissible)")

    p = sub.add_parser("construct", help="write the lookup table of F_alpha,sigma")
    family(p)
    p.add_argument("--orig", action="store_true", help="build the original alpha=1 family (needs gcd(3k, m) = 1)")
    p.add_argument("-o", "--output", default="-")
    field_poly(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("analyze", help="run analyzers on an APNTBL file")
    p.add_argument("table")
    for name, help_ in [("apn", "differential uniformity"), ("spectrum", "full differential spectrum"),
                        ("image", "image / preimage counts"), ("walsh", "extended Walsh spectrum"),
                        ("degree", "algebraic degree"), ("ortho", "ortho-derivative spectrum")]:
        p.add_argument(f"--{name}", action="store_true", help=help_)
    p.add_argument("--all", action="store_true")
    p.add_argument("--json", action="store_true")
    p.add_argument("--csv", metavar="DIR", help="also write spectra as CSV files into DIR")
    field_poly(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="run the verification checks")
    p.add_argument("--m", type=_range_arg, required=True, help="e.g. 3..5 or 4,6")
    p.add_argument("--k", default="all", help="'all' or a list/range of exponents")
    p.add_argument("--checks", default="all", help=f"'all' or comma list of: {', '.join(CHECKS)}")
    p.add_argument("--json", action="store_true")
    p.add_argument("--jobs", type=int, default=None, help="worker processes (default: CPU count)")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    field_poly(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("orbit", help="stabilizer and orbit of f_alpha under K* x GL(2, K)")
    family(p)
    field_poly(p)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("equiv", help="equivalence witnesses and class certification")
    esub = p.add_subparsers(dest="mode", required=True)
    e = esub.add_parser("alpha", help="witness between two alphas at fixed (m, k)")
    family(e, alpha=False)
    e.add_argument("--alpha1", required=True)
    e.add_argument("--alpha2", required=True)
    e.add_argument("-o", "--output")
    field_poly(e)
    e = esub.add_parser("inverse-sigma", help="witness F_alpha,s ~ F_alpha^sbar,sbar")
    family(e)
    e.add_argument("-o", "--output")
    field_poly(e)
    e = esub.add_parser("classes", help="certify the number of classes over all k")
    e.add_argument("--m", type=int, required=True)
    field_poly(e)
    e = esub.add_parser("check", help="verify a witness file between two tables")
    e.add_argument("table_f")
    e.add_argument("table_g")
    e.add_argument("witness")
    p.set_defaults(func=cmd_equiv, field_poly=None)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParameterError, PlanError, SearchTooLargeError, argparse.ArgumentTypeError) as exc:
        print(f"apnlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        if isinstance(exc, TableFormatError):
            print(f"apnlab: format error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(f"apnlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"apnlab: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except EquivalenceError as exc:
        print(f"apnlab: verification failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
