"""Command-line front end.

    opstruct family legendre --k 24
    opstruct check --input inst.json --nmax 12 --horizon 30 --report out.json
    opstruct inverse --input inst.json
    opstruct ortho --input inst.json --format text
    opstruct example christoffel > inst.json

Exit codes: 0 every reported check passed (or was not applicable), 1 some check
failed or errored, 2 the input could not be read.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import corpus
from .errors import OpstructError
from .exact import parse_rational
from .io import ALL_CHECKS, INVERSE_CHECKS, ORTHO_CHECKS, dumps, instance_to_json, parse_instance
from .mops import FAMILIES, classical_family
from .pipeline import run_pipeline
from .report import to_jsonable

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
SUBSET = {"check": ALL_CHECKS, "inverse": INVERSE_CHECKS, "ortho": ORTHO_CHECKS}


def _emit(text: str, target: str | None) -> None:
    if target and target != "-":
        Path(target).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _run_checks(args: argparse.Namespace) -> int:
    try:
        raw = sys.stdin.read() if args.input == "-" else Path(args.input).read_text(encoding="utf-8")
        overrides = {"n_max": args.nmax, "horizon": args.horizon}
        if args.checks:
            overrides["checks"] = [c.strip() for c in args.checks.split(",") if c.strip()]
        inst, cfg = parse_instance(raw, overrides)
    except (OSError, OpstructError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    allowed = SUBSET[args.command]
    cfg = type(cfg)(cfg.n_max, cfg.K, tuple(c for c in cfg.checks if c in allowed), cfg.v_source)
    report = run_pipeline(inst, cfg)
    if args.format == "json":
        text = dumps(report.to_json())
    else:
        text = report.to_text()
    _emit(text, args.report)
    return report.exit_code


def _family(args: argparse.Namespace) -> int:
    try:
        alpha = parse_rational(args.alpha) if args.alpha is not None else None
        beta = parse_rational(args.beta) if args.beta is not None else None
        u, rc = classical_family(args.name, args.k, alpha, beta)
    except OpstructError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    doc = {"family": args.name, "K": args.k, "moments": u.moments, "beta": rc.betas, "gamma": rc.gammas}
    if alpha is not None:
        doc["alpha"] = alpha
    if beta is not None:
        doc["beta_parameter"] = beta
    if args.format == "json":
        text = dumps(to_jsonable(doc))
    else:
        j = to_jsonable(doc)
        text = "".join(f"{key}: {' '.join(map(str, j[key])) if isinstance(j[key], list) else j[key]}\n"
                       for key in sorted(j))
    _emit(text, args.report)
    return EXIT_OK


def _example(args: argparse.Namespace) -> int:
    inst = corpus.NAMED[args.name](n_max=args.nmax)
    _emit(dumps(instance_to_json(inst, include_v=not args.no_v)), args.report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opstruct",
        description="Exact checks for finite structure relations between monic orthogonal polynomial sequences.")
    sub = parser.add_subparsers(dest="command", required=True)

    fam = sub.add_parser("family", help="dump exact moments and recurrence of a classical family")
    fam.add_argument("name", choices=FAMILIES)
    fam.add_argument("--k", type=int, default=24, help="moment depth (default 24)")
    fam.add_argument("--alpha")
    fam.add_argument("--beta")
    fam.add_argument("--format", choices=("json", "text"), default="json")
    fam.add_argument("--report", help="write output here instead of stdout")
    fam.set_defaults(func=_family)

    helps = {"check": "run every check on an instance",
             "inverse": "only the functional-relation checks",
             "ortho": "only the orthogonality-characterization checks"}
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--input", required=True, help="instance JSON file, or - for stdin")
        p.add_argument("--nmax", type=int, help="override config.n_max")
        p.add_argument("--horizon", type=int, help="override config.horizon (moment horizon K)")
        p.add_argument("--checks", help="comma-separated subset of: " + ",".join(SUBSET[name]))
        p.add_argument("--report", help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.set_defaults(func=_run_checks)

    ex = sub.add_parser("example", help="print a worked instance as JSON")
    ex.add_argument("name", choices=sorted(corpus.NAMED))
    ex.add_argument("--nmax", type=int, default=corpus.DEFAULT_NMAX)
    ex.add_argument("--no-v", action="store_true", help="omit v so that it is derived from Q")
    ex.add_argument("--report", help="write output here instead of stdout")
    ex.set_defaults(func=_example)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
