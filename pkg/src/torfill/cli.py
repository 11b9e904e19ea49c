"""Batch command-line surface.

Reports are machine-parseable key=value lines (big integers as decimal
strings, log bases tagged in the field names: _ln for natural logarithm,
_log2 for base 2); table rows are prefixed with `row`.  Exit codes: 0 on
success, 2 on verification failure, 3 on input error.
"""

from __future__ import annotations

import argparse
import math
import sys

from .errors import (CandidateSetTooLarge, InputParseError, TorfillError,
                     Unfillable, UnsupportedDimension, VerificationFailure)

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_INPUT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        raise SystemExit(EXIT_INPUT)


def _add_matrix_args(sub):
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("-m", "--matrix",
                       help="inline matrix: rows split by ';', entries by ','")
    group.add_argument("--matrix-file",
                       help="file with one row per line, whitespace-separated")


def _read_matrix(args):
    from .formats import parse_matrix_inline, parse_matrix_text
    if args.matrix is not None:
        return parse_matrix_inline(args.matrix)
    try:
        with open(args.matrix_file) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputParseError("cannot read %s: %s" % (args.matrix_file, exc))
    return parse_matrix_text(text)


def _emit(key, value):
    if isinstance(value, float):
        value = "%.12g" % value
    print("%s=%s" % (key, value))


def _row(*fields):
    print("row " + " ".join(str(f) for f in fields))


def build_parser() -> _Parser:
    parser = _Parser(prog="torfill",
                     description="Exact filling certificates and spectral "
                                 "invariants for torus self-maps.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("bounds", help="spectral radius, entropy, lower bound")
    _add_matrix_args(p)
    p.add_argument("--precision-cap", type=int, default=640,
                   help="decimal digits cap for root certification")

    p = subs.add_parser("reduce", help="reduce a parallelogram cycle to its "
                                       "rectangle normal form")
    _add_matrix_args(p)
    p.add_argument("--out", help="write the certificate container here")
    p.add_argument("--trace", action="store_true", help="print move rows")

    p = subs.add_parser("fvupper", help="per-power reduction cost experiment")
    _add_matrix_args(p)
    p.add_argument("--jmax", type=int, default=8)

    p = subs.add_parser("torsion", help="torsion growth of coker(A^k - I)")
    _add_matrix_args(p)
    p.add_argument("--kmax", type=int, default=40)

    p = subs.add_parser("gelfand", help="entrywise-norm root sequence")
    _add_matrix_args(p)
    p.add_argument("--jmax", type=int, default=64)

    p = subs.add_parser("psl2z", help="free-product word decomposition")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("-m", "--matrix")
    group.add_argument("--family", type=int, metavar="I",
                       help="use the family matrix [[i+1, i], [1, 1]]")
    p.add_argument("--power", type=int, default=1)

    p = subs.add_parser("fill", help="fill a serialized cycle / verify a "
                                     "certificate file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--cycle", help="chain JSON file with a cycle to fill")
    group.add_argument("--verify", help="certificate JSON file to re-verify")
    p.add_argument("--box", type=int, default=1)
    p.add_argument("--max-expand", type=int, default=3)
    p.add_argument("--out", help="write the found certificate here")

    p = subs.add_parser("selftest", help="run the invariant suites")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    return parser


def _cmd_bounds(args) -> int:
    from .spectral import analyze
    a = _read_matrix(args)
    summary = analyze(a, args.precision_cap)
    n = a.rows
    _emit("n", n)
    _emit("charpoly", ",".join(str(c) for c in summary.charpoly))
    _emit("rho", summary.rho)
    _emit("ln_rho", math.log(summary.rho) if summary.rho > 0 else float("-inf"))
    _emit("entropy_ln", summary.log_sum)
    _emit("n_ln_rho", n * math.log(summary.rho) if summary.rho > 0
          else float("-inf"))
    _emit("fv_lower_ln", 2.0 / (n * (n + 1) * math.log(n + 1)) * summary.log_sum)
    _emit("unit_root_flag", summary.unit_root_flag)
    for i, r in enumerate(summary.roots):
        _row("root_%d" % i, "%.12g%+.12gi" % (r.value.real, r.value.imag),
             "mult=%d" % r.multiplicity, "radius=%.3g" % r.radius,
             "circle=%s" % r.on_unit_circle)
    return EXIT_OK


def _cmd_reduce(args) -> int:
    from .filling import reduce_parallelogram, verify_certificate
    a = _read_matrix(args)
    report = reduce_parallelogram(a)
    ok, diag = verify_certificate(report.certificate)
    _emit("det", report.det)
    _emit("cost", report.cost)
    _emit("log2_norm", report.log2_norm)
    _emit("moves", len(report.trace))
    _emit("verified", ok)
    if args.trace:
        for i, r in enumerate(report.trace):
            _row("move_%d" % i, r.kind, "cost=%d" % r.cost)
    if args.out:
        from .formats import save_certificate
        save_certificate(args.out, report.certificate, report.trace)
        _emit("certificate_file", args.out)
    if not ok:
        sys.stderr.write("verification diagnostics: %s\n" % "; ".join(diag))
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_fvupper(args) -> int:
    from .filling import fv_upper_experiment
    a = _read_matrix(args)
    exp = fv_upper_experiment(a, args.jmax)
    for j, cost, per_j, log2norm in exp.rows:
        _row("j=%d" % j, "cost=%d" % cost, "cost_per_j=%.6g" % per_j,
             "log2_norm=%.6g" % log2norm)
    _emit("k_hat_log2", exp.k_hat)
    return EXIT_OK


def _cmd_torsion(args) -> int:
    from .spectral import torsion_growth_table
    a = _read_matrix(args)
    rows = torsion_growth_table(a, args.kmax)
    for r in rows:
        _row("k=%d" % r.k, "torsion=%d" % r.torsion_order,
             "factors=%s" % ("x".join(str(f) for f in r.invariant_factors) or "1"),
             "log_tors_over_k_ln=%.10g" % r.log_tors_over_k,
             "target_ln=%.10g" % r.target, "full_rank=%s" % r.full_rank)
    usable = [r for r in rows if r.full_rank]
    if usable:
        _emit("last_full_rank_k", usable[-1].k)
        _emit("last_log_tors_over_k_ln", usable[-1].log_tors_over_k)
    _emit("target_ln", rows[-1].target)
    return EXIT_OK


def _cmd_gelfand(args) -> int:
    from .spectral import gelfand_sequence
    a = _read_matrix(args)
    values = gelfand_sequence(a, args.jmax)
    for j, v in enumerate(values, start=1):
        _row("j=%d" % j, "%.12g" % v)
    _emit("tail", values[-1])
    return EXIT_OK


def _cmd_psl2z(args) -> int:
    from .formats import parse_matrix_inline
    from .psl2z import (cyclically_reduced_length, decompose, delta_bounds,
                        family_matrix, reconstruct, word_power)
    family = None
    if args.family is not None:
        a = family_matrix(args.family)
    else:
        a = parse_matrix_inline(args.matrix)
    word = decompose(a)
    if args.power != 1:
        word = word_power(word, args.power)
    if args.family is not None:
        family = (args.family, args.power)
    bounds = delta_bounds(word, family)
    _emit("word", str(word))
    _emit("sign", word.sign)
    _emit("length_cyc", cyclically_reduced_length(word))
    _emit("delta_lower", bounds.lower_str())
    _emit("delta_upper", bounds.upper if bounds.upper is not None else "n/a")
    got = reconstruct(word)
    target = a if args.power == 1 else None
    if target is not None and got.data != target.data:
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_fill(args) -> int:
    from .filling import fill_by_solve, verify_certificate
    from .formats import load_certificate, load_chain, save_certificate
    if args.verify:
        cert, trace = load_certificate(args.verify)
        ok, diag = verify_certificate(cert)
        _emit("cost", cert.cost)
        _emit("verified", ok)
        if not ok:
            sys.stderr.write("verification diagnostics: %s\n" % "; ".join(diag))
            return EXIT_VERIFY
        return EXIT_OK
    z = load_chain(args.cycle)
    cert = fill_by_solve(z, box=args.box, max_expand=args.max_expand)
    _emit("cost", cert.cost)
    _emit("witness_simplices", len(cert.witness.terms))
    if args.out:
        save_certificate(args.out, cert)
        _emit("certificate_file", args.out)
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_all
    results = run_all(args.level)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print("%s %s (%.1fs): %s" % (status, r.name, r.elapsed, r.detail))
        failed += 0 if r.passed else 1
    _emit("passed", len(results) - failed)
    _emit("failed", failed)
    return EXIT_OK if failed == 0 else EXIT_VERIFY


_COMMANDS = {
    "bounds": _cmd_bounds,
    "reduce": _cmd_reduce,
    "fvupper": _cmd_fvupper,
    "torsion": _cmd_torsion,
    "gelfand": _cmd_gelfand,
    "psl2z": _cmd_psl2z,
    "fill": _cmd_fill,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_INPUT
    try:
        return _COMMANDS[args.command](args)
    except InputParseError as exc:
        sys.stderr.write("input error: %s\n" % exc)
        return EXIT_INPUT
    except (Unfillable, CandidateSetTooLarge, VerificationFailure) as exc:
        sys.stderr.write("verification failure: %s\n" % exc)
        return EXIT_VERIFY
    except (UnsupportedDimension, TorfillError) as exc:
        sys.stderr.write("input error: %s\n" % exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
