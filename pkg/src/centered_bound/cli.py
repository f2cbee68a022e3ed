"""Command-line interface: ``centered-bound <command> ...``.

Exit codes: 0 success, 1 bad catalog file, 2 usage error, 3 missing
catalog, 4 numeric domain error.
"""

import argparse
import csv
import io
import json
import math
import sys
import time

from . import closed_forms, forest_io
from .errors import DomainError, InvalidArity, MissingCatalog, ParseError
from .search import BoundQuery, flat_bound, minimize
from .trees import decode, enumerate_trees, render_ascii

EXIT_OK = 0
EXIT_BAD_FILE = 1
EXIT_USAGE = 2
EXIT_CATALOG = 3
EXIT_DOMAIN = 4

TABLE_CAP = 9


class UsageError(Exception):
    pass


def truncate(value, places):
    """Floor ``value`` to ``places`` decimals, returned as fixed-point text."""
    scale = 10**places
    return f"{math.floor(value * scale) / scale:.{places}f}"


def fmt15(value):
    return f"{value:.15g}"


def num15(value):
    return float(fmt15(value))


def code_str(code):
    return "(" + ",".join(str(x) for x in code) + ")"


def _positive_floats(tokens):
    out = []
    for t in tokens:
        try:
            x = float(t)
        except ValueError:
            raise UsageError(f"not a number: {t!r}")
        if not x > 0.0 or math.isinf(x):
            raise UsageError(f"bounds must be positive and finite: {t!r}")
        out.append(x)
    return out


def _to_half_sinh(values, convention):
    if convention == "length":
        try:
            return [math.sinh(x / 2.0) for x in values]
        except OverflowError:
            raise DomainError(f"length bound too large: {max(values)!r}")
    return list(values)


def _tree_source(args, n):
    """Catalog codes for n slots from --forest or the environment, else None."""
    lib = None
    path = getattr(args, "forest", None)
    if path:
        try:
            lib = forest_io.load_library(path)
        except OSError as exc:
            raise MissingCatalog(f"cannot read catalog {path}: {exc.strerror}") from exc
    else:
        lib = forest_io.library_from_env()
    if lib is None:
        return None
    return tuple(lib.codes_for_n(n))


def _run_bound(args, bounds):
    query = BoundQuery(tuple(bounds), reduce_symmetry=not args.no_reduce, trees=_tree_source(args, len(bounds)))
    return minimize(query, jobs=args.jobs)


def _record(result, args, raw):
    return {
        "query": {
            "bounds": [num15(x) for x in raw],
            "convention": args.convention,
            "reduce_symmetry": not args.no_reduce,
        },
        "value": num15(result.value),
        "value_truncated": float(truncate(result.value, args.truncate)),
        "tree_number": result.tree_index + 1,
        "tree_code": list(result.tree_code),
        "assignment": list(result.assignment),
        "slot_values": [num15(x) for x in result.slot_values],
        "evaluations": result.evaluations,
    }


def cmd_bound(args, out):
    raw = _positive_floats(args.values)
    if len(raw) < 3:
        raise UsageError("bound needs at least 3 values")
    started = time.perf_counter()
    result = _run_bound(args, _to_half_sinh(raw, args.convention))
    elapsed = time.perf_counter() - started
    rec = _record(result, args, raw)

    if args.format == "json":
        out.write(json.dumps(rec) + "\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "value", "value_truncated", "tree_number", "tree_code", "assignment", "evaluations"])
        w.writerow(
            [
                len(raw),
                fmt15(result.value),
                truncate(result.value, args.truncate),
                rec["tree_number"],
                code_str(result.tree_code),
                " ".join(map(str, result.assignment)),
                result.evaluations,
            ]
        )
    else:
        out.write(f"bound        {truncate(result.value, args.truncate)}\n")
        out.write(f"value        {fmt15(result.value)}\n")
        out.write(f"tree         #{rec['tree_number']} {code_str(result.tree_code)}\n")
        out.write(f"assignment   {' '.join(map(str, result.assignment))}\n")
        out.write(f"slot values  {' '.join(fmt15(x) for x in result.slot_values)}\n")
        out.write(f"evaluations  {result.evaluations}\n")
    if args.timing:
        sys.stderr.write(f"elapsed {elapsed:.3f}s\n")
    return EXIT_OK


def cmd_table(args, out):
    if not 4 <= args.n_min <= args.n_max:
        raise UsageError("need 4 <= n-min <= n-max")
    if args.n_max > args.cap:
        raise UsageError(f"n-max {args.n_max} exceeds the cap {args.cap} (raise it with --cap)")
    if not args.value > 0.0:
        raise UsageError("value must be positive")
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        result = _run_bound(args, [args.value] * n)
        rows.append((n, flat_bound(n, args.value), result))

    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "flat_bound", "bound", "flat_bound_full", "bound_full", "tree_number", "tree_code"])
        for n, flat, r in rows:
            w.writerow(
                [n, truncate(flat, 3), truncate(r.value, 3), fmt15(flat), fmt15(r.value), r.tree_index + 1, code_str(r.tree_code)]
            )
    else:
        out.write(f"{'n':>3}  {'(n-2)A_m':>9}  {'min B_T':>9}  tree\n")
        for n, flat, r in rows:
            out.write(f"{n:>3}  {truncate(flat, 3):>9}  {truncate(r.value, 3):>9}  #{r.tree_index + 1} {code_str(r.tree_code)}\n")
    return EXIT_OK


def _sweep_points(args):
    if not 0.0 < args.x_min <= args.x_max:
        raise UsageError("need 0 < x-min <= x-max")
    if args.points is not None:
        if args.points < 1:
            raise UsageError("points must be at least 1")
        if args.points == 1:
            return [args.x_min]
        step = (args.x_max - args.x_min) / (args.points - 1)
        return [args.x_min + i * step for i in range(args.points)]
    if not args.step > 0.0:
        raise UsageError("step must be positive")
    count = int(math.floor((args.x_max - args.x_min) / args.step + 1e-9)) + 1
    return [args.x_min + i * args.step for i in range(count)]


def cmd_sweep(args, out):
    fixed = _positive_floats(args.fixed)
    if len(fixed) < 2:
        raise UsageError("sweep needs at least 2 fixed entries")
    xs = _sweep_points(args)
    with_forms = len(fixed) == 3 and all(x == 1.0 for x in fixed)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["x", "value", "value_truncated", "identity_case", "sigma_case", "closed_form"])
    for x in xs:
        r = _run_bound(args, fixed + [x])
        if with_forms:
            extra = [fmt15(closed_forms.identity_case(x)), fmt15(closed_forms.sigma_case(x)), fmt15(closed_forms.bound(x))]
        else:
            extra = ["", "", ""]
        w.writerow([fmt15(x), fmt15(r.value), truncate(r.value, 3)] + extra)
    return EXIT_OK


def cmd_trees(args, out):
    if args.n < 3:
        raise UsageError("n must be at least 3")
    codes = enumerate_trees(args.n)
    if args.count:
        out.write(f"{len(codes)}\n")
        return EXIT_OK
    for i, code in enumerate(codes, 1):
        if args.style == "ascii":
            out.write(f"#{i} {code_str(code)}\n{render_ascii(decode(code))}\n\n")
        else:
            out.write(code_str(code) + "\n")
    return EXIT_OK


def cmd_forest(args, out):
    if args.forest_cmd == "generate":
        if args.max_n < 3:
            raise UsageError("max-n must be at least 3")
        lib = forest_io.ForestLibrary.native(args.max_n - 3)
        data = forest_io.write_catalog(lib) if args.catalog else forest_io.write_forest(lib)
        with open(args.output, "wb") as fh:
            fh.write(data)
        out.write(f"wrote {args.output}: n = 3..{args.max_n}\n")
        return EXIT_OK

    try:
        lib = forest_io.load_library(args.path)
    except ParseError as exc:
        out.write(f"{args.path}: {exc}\n")
        return EXIT_BAD_FILE
    status = EXIT_OK
    for k, (found, expected) in forest_io.completeness(lib).items():
        mark = "ok" if found == expected else f"INCOMPLETE (expected {expected})"
        if found != expected:
            status = EXIT_BAD_FILE
        out.write(f"n = {k + 3:>2}  k = {k:>2}  trees = {found:>5}  {mark}\n")
    return status


def _add_search_flags(p):
    p.add_argument("--no-reduce", action="store_true", help="try all n! assignments per tree")
    p.add_argument("--forest", metavar="PATH", help=f"tree catalog file (default: ${forest_io.ENV_VAR} or native)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="centered-bound",
        description="Lower bounds on the area of centered dual two-cells from edge length bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="minimum area bound for one tuple")
    p.add_argument("values", nargs="+", help="edge length bounds")
    p.add_argument("--convention", choices=["sinh-half", "length"], default="sinh-half")
    p.add_argument("--truncate", type=int, default=3, metavar="K")
    p.add_argument("--format", choices=["text", "json", "csv"], default="text")
    p.add_argument("--timing", action="store_true", help="report elapsed time on stderr")
    _add_search_flags(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("table", help="old and new bounds for equal entries")
    p.add_argument("--n-min", type=int, default=4)
    p.add_argument("--n-max", type=int, default=9)
    p.add_argument("--value", type=float, default=1.0, help="common half-sinh value")
    p.add_argument("--cap", type=int, default=TABLE_CAP)
    p.add_argument("--format", choices=["text", "csv"], default="text")
    _add_search_flags(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("sweep", help="vary one entry, CSV out")
    p.add_argument("--fixed", nargs="+", default=["1", "1", "1"])
    p.add_argument("--x-min", type=float, default=0.05)
    p.add_argument("--x-max", type=float, default=3.0)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--step", type=float, default=0.05)
    g.add_argument("--points", type=int)
    _add_search_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("trees", help="list or count rooted trees")
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--count", action="store_true")
    g.add_argument("--list", action="store_true")
    p.add_argument("--format", dest="style", choices=["code", "ascii"], default="code")
    p.set_defaults(func=cmd_trees)

    p = sub.add_parser("forest", help="catalog file utilities")
    fsub = p.add_subparsers(dest="forest_cmd", required=True)
    v = fsub.add_parser("validate")
    v.add_argument("path")
    gen = fsub.add_parser("generate")
    gen.add_argument("--max-n", type=int, required=True)
    gen.add_argument("-o", "--output", required=True)
    gen.add_argument("--catalog", action="store_true", help="write the self-describing layout")
    p.set_defaults(func=cmd_forest)
    return parser


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, out)
    except (UsageError, InvalidArity) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except MissingCatalog as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CATALOG
    except ParseError as exc:
        sys.stderr.write(f"error: catalog: {exc}\n")
        return EXIT_CATALOG
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_BAD_FILE
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN


def run(argv=None):
    """Capture ``main`` output as text; handy in tests and notebooks."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
