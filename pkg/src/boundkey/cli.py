"""Command-line front end.

Exit codes: 0 on success, 1 on bad input, 2 when a numerical check fails.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .blocks import BlockOperator
from .keyrate import CURVE_HEADER, key_curve
from .lemmas import (lemma_a1_suite, lemma_a2_suite, lemma_v_suite, ppt_suite)
from .linalg import min_eigenvalue, trace_norm
from .serialize import csv_text, dumps, matrix_from_json, matrix_to_json
from .states import (construction_one, construction_two, ghz, pdit_example, seed_unitary,
                     smolin_family)
from .twisting import closeness_report

FAMILIES = ("one", "two", "pdit-example", "ghz", "smolin")
SUITES = ("a1", "a2", "v1", "v2", "v3", "v4", "ppt", "all")
FIGURES = {
    "fig1a": ("one", 3, None),
    "fig1b": ("one", 2, None),
    "fig2a": ("one", 3, None),
    "fig2b": ("one", 2, None),
    "fig3": ("two", 3, None),
    "fig4a": ("two", 3, "hermitian"),
    "fig4b": ("two", 3, "general"),
}


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=1e-9, help="eigenvalue tolerance")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--restarts", type=int, default=50)
    return p


def build_parser() -> Parser:
    common = _common()
    parser = Parser(prog="boundkey", description="Bound-entangled multipartite key toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a state and write it as JSON")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--D", type=int, default=2, help="shield (or key for ghz) dimension")
    p.add_argument("--N", type=int, default=2, help="parties; for smolin the number of qubit pairs")
    p.add_argument("--unitary", default="vandermonde", help="seed for family two")
    p.add_argument("--out", required=True)

    p = sub.add_parser("check", parents=[common], help="run checks on a stored state")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--ppt", action="store_true")
    p.add_argument("--psd", action="store_true")
    p.add_argument("--closeness", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("distill", parents=[common], help="key-rate curve along k as CSV")
    p.add_argument("--family", choices=("one", "two"), required=True)
    p.add_argument("--unitary", default="vandermonde")
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--k-max", type=int, default=40)
    p.add_argument("--prob-model", choices=("hermitian", "general"))
    p.add_argument("--csv")

    p = sub.add_parser("figures", parents=[common], help="CSV data for every figure analogue")
    p.add_argument("--outdir", default=".")
    p.add_argument("--D-list", default="2,3,4,5")
    p.add_argument("--k-min", type=int, default=1)
    p.add_argument("--k-max", type=int, default=60)

    p = sub.add_parser("bell", parents=[common], help="optimize the Bell value of a Smolin state")
    p.add_argument("--n", type=int, default=1, help="number of qubit pairs")
    p.add_argument("--out")

    p = sub.add_parser("lemmas", parents=[common], help="run numerical lemma suites")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--D", type=int, default=3)
    p.add_argument("--N", type=int, default=3)
    p.add_argument("--out")
    return parser


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise UsageError(msg)


def _check_dn(args, min_n: int = 2) -> None:
    _require(args.D >= 2, f"--D must be at least 2, got {args.D}")
    _require(args.N >= min_n, f"--N must be at least {min_n}, got {args.N}")


def _seed(kind: str, dim: int):
    try:
        return seed_unitary(kind, dim)
    except ValueError as exc:
        raise UsageError(f"--unitary: {exc}") from exc


def cmd_construct(args) -> int:
    fam = args.family
    if fam == "smolin":
        _require(args.N >= 1, f"--N must be at least 1, got {args.N}")
        obj = matrix_to_json(smolin_family(args.N))
    else:
        _check_dn(args)
        if fam == "one":
            state = construction_one(args.D, args.N)
        elif fam == "two":
            state = construction_two(_seed(args.unitary, args.D), args.N)
        elif fam == "ghz":
            state = ghz(args.D, args.N)
        else:
            state = pdit_example(args.D, args.N)
        obj = state.to_json()
    _emit(dumps(obj) + "\n", args.out)
    return 0


def _load(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"--in: cannot read {path}: {exc}") from exc
    if "blocks" in obj:
        return BlockOperator.from_json(obj)
    return matrix_from_json(obj)


def cmd_check(args) -> int:
    _require(args.ppt or args.psd or args.closeness, "check needs at least one of --ppt, --psd, --closeness")
    state = _load(args.inp)
    dense = state.assemble() if isinstance(state, BlockOperator) else state
    report, ok = {}, True
    if args.psd:
        e = min_eigenvalue(dense)
        passed = e >= -args.tol * max(1.0, trace_norm(dense))
        report["psd"] = {"min_eigenvalue": e, "passed": passed}
        ok &= passed
    if args.ppt:
        rep = ppt_suite(state, tol=args.tol)
        report["ppt"] = rep.to_json()
        ok &= rep.passed
    if args.closeness:
        _require(isinstance(state, BlockOperator), "--closeness needs a key/shield block state")
        report["closeness"] = closeness_report(state).to_json()
    report["passed"] = bool(ok)
    _emit(dumps(report, indent=2) + "\n", args.out)
    return 0 if ok else 2


def _curve_rows(family, dim, n, k_min, k_max, prob_model, unitary):
    pts = key_curve(family, dim, n, range(k_min, k_max + 1), prob_model=prob_model, seed=unitary)
    return [p.row() for p in pts]


def _check_k(args) -> None:
    _require(args.k_min >= 1, f"--k-min must be at least 1, got {args.k_min}")
    _require(args.k_max >= args.k_min, "--k-max must not be below --k-min")


def cmd_distill(args) -> int:
    _check_dn(args)
    _check_k(args)
    if args.family == "two":
        _seed(args.unitary, args.D)
    rows = _curve_rows(args.family, args.D, args.N, args.k_min, args.k_max,
                       args.prob_model, args.unitary)
    _emit(csv_text(CURVE_HEADER, rows), args.csv)
    return 0


def cmd_figures(args) -> int:
    _check_k(args)
    try:
        dims = [int(x) for x in args.D_list.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"--D-list: {exc}") from exc
    _require(dims and min(dims) >= 2, "--D-list needs dimensions of at least 2")
    os.makedirs(args.outdir, exist_ok=True)
    for name, (family, n, model) in FIGURES.items():
        rows = []
        for dim in dims:
            rows += _curve_rows(family, dim, n, args.k_min, args.k_max, model, "vandermonde")
        with open(os.path.join(args.outdir, name + ".csv"), "w", newline="") as fh:
            fh.write(csv_text(CURVE_HEADER, rows))
    return 0


def cmd_bell(args) -> int:
    from .bell import bell_optimize

    _require(1 <= args.n <= 3, f"--n must be between 1 and 3, got {args.n}")
    _require(args.restarts >= 1, "--restarts must be positive")
    value, settings = bell_optimize(smolin_family(args.n), restarts=args.restarts, seed=args.seed)
    out = {"n": args.n, "qubits": 2 * args.n, "restarts": args.restarts, "seed": args.seed,
           "value": value, "classical_bound": 2.0, "violates": value > 2.0 + args.tol,
           "vectors": settings.vectors}
    _emit(dumps(out, indent=2) + "\n", args.out)
    return 0


def cmd_lemmas(args) -> int:
    _check_dn(args)
    reports = []
    want = SUITES[:-1] if args.suite == "all" else (args.suite,)
    for s in want:
        if s == "a1":
            reports.append(lemma_a1_suite(seed=args.seed))
        elif s == "a2":
            reports.append(lemma_a2_suite(seed=args.seed))
        elif s == "ppt":
            for fam, state in (("one", construction_one(args.D, args.N)),
                               ("two", construction_two(seed_unitary("vandermonde", args.D), args.N))):
                rep = ppt_suite(state, tol=args.tol)
                rep.grid["family"] = fam
                reports.append(rep)
        else:
            reports.append(lemma_v_suite(s.upper(), args.D, args.N))
    ok = all(r.passed for r in reports)
    out = {"passed": ok, "reports": [r.to_json() for r in reports]}
    _emit(dumps(out, indent=2) + "\n", args.out)
    return 0 if ok else 2


COMMANDS = {"construct": cmd_construct, "check": cmd_check, "distill": cmd_distill,
            "figures": cmd_figures, "bell": cmd_bell, "lemmas": cmd_lemmas}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"boundkey {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except np.linalg.LinAlgError as exc:
        print(f"boundkey {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
