"""Command-line driver.

Exit codes: 0 when every asserted check passes, 2 on an exact-identity
failure (a repro file is written next to the report), 64 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .constructions import KINDS, ConstructionSpec, build
from .errors import FFIncidenceError
from .field_core import make_field
from .harness import DEFAULT_GRID, IdentityConfig, SweepConfig, run_identity_suite, run_theorem_sweep, to_csv, to_json
from .projections import projection_intersection_sweep
from .theorems import REGISTRY
from .vector_geometry import PointSet, load_point_set, space

EXIT_OK = 0
EXIT_IDENTITY = 2
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _grid_entry(text: str) -> tuple[int, int, int]:
    try:
        p, ell, d = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected p,ell,d, got {text!r}") from None
    return p, ell, d


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ffincidence", description="Rigid-motion incidence experiments over finite fields.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="run the exact-identity suite")
    v.add_argument("--grid", type=_grid_entry, nargs="*", default=None, metavar="P,ELL,D")
    v.add_argument("--trials", type=int, default=3)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", default=None)
    v.add_argument("--format", choices=("json", "csv"), default="json")
    v.add_argument("--inject-fault", choices=("sphere_sign",), default=None, help="corrupt a closed form (negative control)")

    s = sub.add_parser("sweep", help="estimate implied constants for one theorem")
    s.add_argument("--theorem", required=True)
    s.add_argument("--p", type=int, nargs="+", required=True)
    s.add_argument("--ell", type=int, default=1)
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--trials", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--densities", type=float, nargs="+", default=None)
    s.add_argument("--no-structured", action="store_true", help="random sets only")
    s.add_argument("--sets", nargs=2, default=None, metavar=("A_FILE", "B_FILE"), help="use these point sets")
    s.add_argument("--out", default=None)
    s.add_argument("--format", choices=("json", "csv"), default="json")

    c = sub.add_parser("construct", help="build one of the extremal set families")
    c.add_argument("--kind", required=True, choices=KINDS)
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--ell", type=int, default=1)
    c.add_argument("--d", type=int, default=3)
    c.add_argument("--c", type=Fraction, default=None)
    c.add_argument("--x-length", type=int, default=None)
    c.add_argument("--out", default=None, help="directory for A.txt and B.txt; prints to stdout otherwise")

    pr = sub.add_parser("project", help="projection sizes and common projections over all m-subspaces")
    pr.add_argument("--m", type=int, required=True)
    pr.add_argument("--p", type=int, required=True)
    pr.add_argument("--ell", type=int, default=1)
    pr.add_argument("--d", type=int, default=2)
    pr.add_argument("--a", default=None, help="point-set file for A")
    pr.add_argument("--b", default=None, help="point-set file for B")
    pr.add_argument("--density", type=float, default=0.3, help="random A, B when no files are given")
    pr.add_argument("--seed", type=int, default=0)
    pr.add_argument("--out", default=None)
    return ap


def cmd_verify(args) -> int:
    grid = DEFAULT_GRID if args.grid is None else tuple(args.grid)
    report = run_identity_suite(IdentityConfig(grid=grid, trials=args.trials, seed=args.seed, fault=args.inject_fault))
    _write(to_json(report) if args.format == "json" else to_csv(report), args.out)
    if report["summary"]["passed"]:
        return EXIT_OK
    repro = Path(args.out).with_suffix(".repro.json") if args.out and args.out != "-" else Path("ffincidence-repro.json")
    repro.write_text(json.dumps({"schema": 1, "seed": args.seed, "failures": report["failures"]}, sort_keys=True, indent=2) + "\n")
    for f in report["failures"]:
        print(f"identity failure: {f['check']} at p={f['p']} ell={f['ell']} d={f['d']} error={f['error']:.3g}", file=sys.stderr)
    print(f"repro written to {repro}", file=sys.stderr)
    return EXIT_IDENTITY


def cmd_sweep(args) -> int:
    if args.theorem not in REGISTRY:
        raise UsageError(f"unknown theorem id {args.theorem!r}; known: {', '.join(sorted(REGISTRY))}")
    cfg = SweepConfig(
        theorem_id=args.theorem,
        grid=tuple((p, args.ell, args.d) for p in args.p),
        trials=args.trials,
        seed=args.seed,
        include_structured=not args.no_structured,
        set_files=tuple(args.sets) if args.sets else None,
    )
    if args.densities:
        cfg.densities = tuple(args.densities)
    report = run_theorem_sweep(cfg)
    _write(to_json(report) if args.format == "json" else to_csv(report), args.out)
    return EXIT_OK if report["summary"].get("passed", True) else EXIT_IDENTITY


def cmd_construct(args) -> int:
    spec = ConstructionSpec(kind=args.kind, p=args.p, ell=args.ell, d=args.d, c=args.c, x_length=args.x_length)
    sets = build(spec)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, S in sets.items():
            S.save(out / f"{name}.txt")
    else:
        for name, S in sets.items():
            sys.stdout.write(f"# {name} |{name}|={S.card}\n{S.to_text()}")
    return EXIT_OK


def cmd_project(args) -> int:
    ctx = make_field(args.p, args.ell)
    if not 1 <= args.m < args.d:
        raise UsageError("need 1 <= m < d")
    if (args.a is None) != (args.b is None):
        raise UsageError("give both --a and --b, or neither")
    if args.a:
        A, B = load_point_set(args.a, ctx), load_point_set(args.b, ctx)
    else:
        rng = np.random.default_rng([args.seed, args.p, args.ell, args.d])
        sp = space(ctx, args.d)
        A, B = PointSet.random(sp, args.density, rng), PointSet.random(sp, args.density, rng)
    sweep = projection_intersection_sweep(A, B, args.m)
    _write(sweep.to_csv(), args.out)
    print(json.dumps({**sweep.summary, "count_bound_ok": sweep.count_bound_ok}, sort_keys=True), file=sys.stderr)
    return EXIT_OK if sweep.count_bound_ok else EXIT_IDENTITY


COMMANDS = {"verify": cmd_verify, "sweep": cmd_sweep, "construct": cmd_construct, "project": cmd_project}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ffincidence: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FFIncidenceError, OSError) as exc:
        print(f"ffincidence: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
