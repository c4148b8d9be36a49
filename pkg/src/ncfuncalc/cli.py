"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 input or flag error,
3 dimension mismatch. Diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bench, fileio
from .doi import eval_f_AB
from .linalg import ShapeError, operator_norm, schatten_1

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_INPUT = 2
EXIT_SHAPE = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags already; keep messages on stderr
    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)


def _positive_int(lo):
    def parse(text):
        v = int(text)
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}")
        return v

    return parse


def _fail(code, msg):
    print(f"error: {msg}", file=sys.stderr)
    return code


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_funcalc(args) -> int:
    try:
        f = fileio.read_function(args.f)
        A, _ = fileio.read_matrix(args.A)
        B, _ = fileio.read_matrix(args.B)
    except (OSError, ValueError) as exc:
        return _fail(EXIT_INPUT, exc)
    try:
        res = eval_f_AB(f, A, B)
    except ShapeError as exc:
        return _fail(EXIT_SHAPE, exc)
    except ValueError as exc:
        return _fail(EXIT_INPUT, exc)
    fileio.write_matrix(args.out, res.value, "general")
    report = {
        "n": int(res.value.shape[0]),
        "operator_norm": operator_norm(res.value),
        "trace_norm": schatten_1(res.value),
        "frobenius_norm": float(np.linalg.norm(res.value)),
        "spectrum_A": [float(x) for x in res.spectrum_A],
        "spectrum_B": [float(x) for x in res.spectrum_B],
    }
    with open(args.out + ".json", "w") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def cmd_perturb(args) -> int:
    try:
        report = bench.run_lipschitz_trace(args.trials, args.n, args.degree, seed=args.seed, eps=args.eps)
    except ValueError as exc:
        return _fail(EXIT_INPUT, exc)
    rows = [r.row() for r in report.trials]
    summary = [("max_ratio", report.max_ratio), ("max_split_residual", report.max_split_residual)]
    _write(args.out, fileio.dumps_table(bench.TrialRecord.COLUMNS, rows, summary))
    return EXIT_OK


def cmd_blowup(args) -> int:
    if args.nmax > 256:
        return _fail(EXIT_INPUT, "--nmax must be <= 256")
    report = bench.run_opnorm_blowup(bench.doubling_sizes(args.nmax), restarts=args.restarts, seed=args.seed)
    rows = [r.row() for r in report.rows]
    summary = [("monotone", report.monotone), ("growth_held", report.growth_held)]
    _write(args.out, fileio.dumps_table(bench.BlowupRow.COLUMNS, rows, summary))
    return EXIT_OK


def _load_any(path):
    with open(path) as fh:
        text = fh.read()
    kind = next((ln.split() for ln in text.splitlines() if ln.split("#", 1)[0].strip()), ["", ""])
    if kind[-1] in ("trigpoly", "philattice"):
        return fileio.loads_function(text)
    return fileio.loads_matrix(text)


def cmd_verify(args) -> int:
    if args.list:
        for name in bench.check_names():
            print(name)
        return EXIT_OK
    for path in args.fixture:
        try:
            _load_any(path)
        except (OSError, ValueError) as exc:
            return _fail(EXIT_INPUT, f"{path}: {exc}")
    summary = bench.run_crossvalidation(seed=args.seed)
    for c in summary.results:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status}\t{c.name}\t{c.module}\tresidual={c.residual:.3e}\ttol={c.tol:.1e}")
    if not summary.passed:
        names = ", ".join(c.name for c in summary.failures())
        return _fail(EXIT_VERIFY, f"failed checks: {names}")
    return EXIT_OK


def build_parser():
    p = _Parser(prog="ncfuncalc", description="Functions of pairs of Hermitian matrices.")
    p.add_argument("--seed", type=int, default=0, help="global seed (default 0)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("funcalc", help="evaluate f(A, B) from files")
    s.add_argument("--f", required=True, help="FunctionFile")
    s.add_argument("--A", required=True, help="MatrixFile (hermitian)")
    s.add_argument("--B", required=True, help="MatrixFile (hermitian)")
    s.add_argument("--out", required=True, help="output MatrixFile; report goes to OUT.json")
    s.set_defaults(run=cmd_funcalc)

    s = sub.add_parser("perturb", help="trace-norm Lipschitz trials")
    s.add_argument("--trials", type=_positive_int(0), default=200)
    s.add_argument("--n", type=_positive_int(1), default=16)
    s.add_argument("--degree", type=_positive_int(0), default=8)
    s.add_argument("--eps", type=float, default=1e-2)
    s.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    s.add_argument("--out", default="-")
    s.set_defaults(run=cmd_perturb)

    s = sub.add_parser("blowup", help="operator-norm growth on the lattice counterexample")
    s.add_argument("--nmax", type=_positive_int(1), default=256)
    s.add_argument("--restarts", type=_positive_int(0), default=2)
    s.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    s.add_argument("--out", default="-")
    s.set_defaults(run=cmd_blowup)

    s = sub.add_parser("verify", help="run every oracle cross-check")
    s.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    s.add_argument("--list", action="store_true", help="list checks without running them")
    s.add_argument("--fixture", action="append", default=[], help="matrix or function file to validate first (repeatable)")
    s.set_defaults(run=cmd_verify)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # bad flags exit 2, --help exits 0
        return int(exc.code or 0)
    if getattr(args, "eps", 1.0) <= 0 or not np.isfinite(getattr(args, "eps", 1.0)):
        return _fail(EXIT_INPUT, "--eps must be positive")
    return args.run(args)


if __name__ == "__main__":
    sys.exit(main())
