"""Command-line interface: classification tables, single-triple queries,
genus computation, bound enumeration, and fixture management.

Exit codes: 0 fully determined, 1 operational error, 2 data error (cache
miss, unresolvable label), 3 undetermined rows present.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import bounds as bounds_mod
from .classifier import (
    ClassificationTable,
    GoodnessEngine,
    GoodnessKind,
    classify_modular_curves,
    classify_quaternionic,
)
from .curves import CurveSpec, Flavor, appearing_reps, genus_from_report
from .lmfdb import CacheMissError, FixtureSource, LmfdbClient, TransportError

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_DATA = 2
EXIT_UNDETERMINED = 3

# rows exercised by the ramified-level classification driver
QUATERNIONIC_A_ROWS = [
    {"D": 6, "A": 54, "N": 1}, {"D": 6, "A": 18, "N": 1},
    {"D": 6, "A": 144, "N": 1}, {"D": 6, "A": 12, "N": 1},
    {"D": 6, "A": 24, "N": 1}, {"D": 6, "A": 36, "N": 1},
    {"D": 6, "A": 48, "N": 1}, {"D": 6, "A": 72, "N": 1},
    {"D": 10, "A": 100, "N": 1}, {"D": 10, "A": 20, "N": 1},
    {"D": 10, "A": 50, "N": 1}, {"D": 22, "A": 176, "N": 1},
    {"D": 22, "A": 44, "N": 1}, {"D": 22, "A": 88, "N": 1},
    {"D": 14, "A": 28, "N": 1}, {"D": 34, "A": 68, "N": 1},
    {"D": 58, "A": 116, "N": 1}, {"D": 82, "A": 164, "N": 1},
    {"D": 15, "A": 75, "N": 1}, {"D": 15, "A": 45, "N": 1},
    {"D": 21, "A": 63, "N": 1}, {"D": 57, "A": 171, "N": 1},
    {"D": 93, "A": 279, "N": 1}, {"D": 14, "A": 98, "N": 1},
    {"D": 6, "A": 12, "N": 5}, {"D": 6, "A": 12, "N": 7},
    {"D": 6, "A": 12, "N": 13}, {"D": 10, "A": 20, "N": 3},
    {"D": 6, "A": 18, "N": 5}, {"D": 6, "A": 18, "N": 13},
    {"D": 21, "A": 63, "N": 2},
    {"D": 10, "A": 40, "N": 1}, {"D": 6, "A": 96, "N": 1},
    {"D": 6, "A": 108, "N": 1}, {"D": 6, "A": 162, "N": 1},
    {"D": 22, "A": 242, "N": 1}, {"D": 10, "A": 250, "N": 1},
    {"D": 22, "A": 352, "N": 1}, {"D": 33, "A": 363, "N": 1},
    {"D": 15, "A": 375, "N": 1}, {"D": 15, "A": 135, "N": 1},
    {"D": 21, "A": 189, "N": 1}, {"D": 6, "A": 12, "N": 19},
]

SHIMURA_D_RANGES = {
    6: 40, 10: 23, 14: 9, 15: 8, 21: 5, 22: 7, 26: 5, 39: 4,
    210: 1, 330: 1,
}


def build_source(args):
    if getattr(args, "cache_dir", None):
        return LmfdbClient(
            args.cache_dir, offline=getattr(args, "offline", False)
        )
    root = getattr(args, "fixture_bundle", None)
    return FixtureSource(root)


def _emit_table(table: ClassificationTable, fmt: str, out=None):
    out = out if out is not None else sys.stdout
    out.write(table.to_json() + "\n" if fmt == "json" else table.to_tsv() + "\n")


def cmd_classify(args) -> int:
    source = build_source(args)
    if args.family == "x0":
        table = classify_modular_curves(source, args.max_n, Flavor.GAMMA0, jobs=args.jobs)
    elif args.family == "x1":
        table = classify_modular_curves(source, args.max_n, Flavor.GAMMA1, jobs=args.jobs)
    elif args.family == "xfull":
        table = classify_modular_curves(
            source, args.max_n, Flavor.GAMMA_FULL, projectivized=False, jobs=args.jobs
        )
    elif args.family == "quat":
        rows = []
        ds = [int(d) for d in args.d.split(",")] if args.d else sorted(SHIMURA_D_RANGES)
        for D in ds:
            n_max = args.max_n or SHIMURA_D_RANGES.get(D, 1)
            for n in range(1, n_max + 1):
                if _coprime(n, D):
                    rows.append({"D": D, "N": n})
        table = classify_quaternionic(source, rows, jobs=args.jobs)
    elif args.family == "quat-a":
        table = classify_quaternionic(source, QUATERNIONIC_A_ROWS, jobs=args.jobs)
    else:
        print(f"unknown family {args.family}", file=sys.stderr)
        return EXIT_ERROR
    _emit_table(table, args.format)
    if table.undetermined_rows():
        return EXIT_UNDETERMINED
    return EXIT_OK


def _coprime(a, b):
    import math

    return math.gcd(a, b) == 1


def cmd_triple(args) -> int:
    source = build_source(args)
    labels = args.labels
    curve = CurveSpec(
        discriminant=args.d,
        level=args.n,
        ramified_level=args.a,
        flavor=Flavor.GAMMA1 if args.gamma1 else Flavor.GAMMA0,
    )
    engine = GoodnessEngine(source)
    report = appearing_reps(curve, source, engine.ext)
    byname = {}
    for rep in report.reps:
        byname.setdefault(rep.embedding.label, rep)
    try:
        triple = tuple(byname[l] for l in labels)
    except KeyError as e:
        print(f"label {e.args[0]} does not appear in {curve.describe()}",
              file=sys.stderr)
        return EXIT_DATA
    cert = engine.global_verdict(curve, triple)
    for p in sorted(cert.verdicts):
        v = cert.verdicts[p]
        extra = f" ({v.reason.value})" if v.reason else ""
        print(f"p={p}: {v.outcome.value} via {v.criterion}{extra}")
    print(f"global: {cert.global_outcome.value}")
    return EXIT_OK if cert.global_outcome.value != "undetermined" else EXIT_UNDETERMINED


def cmd_genus(args) -> int:
    source = build_source(args)
    curve = CurveSpec(
        discriminant=args.d,
        level=args.n,
        ramified_level=args.a,
        level_full=args.full,
        flavor=Flavor.GAMMA_FULL
        if args.full > 1
        else (Flavor.GAMMA1 if args.gamma1 else Flavor.GAMMA0),
        projectivized=not args.x,
    )
    try:
        report = appearing_reps(curve, source)
    except CacheMissError as e:
        print(str(e), file=sys.stderr)
        return EXIT_DATA
    g = genus_from_report(curve, report)
    payload = {
        "curve": curve.describe(),
        "total_h10": g.total,
        "components": g.components,
        "genus_per_component": g.per_component,
        "partial": g.blockers,
    }
    print(json.dumps(payload, indent=1))
    return EXIT_OK if not g.is_partial else EXIT_UNDETERMINED


def cmd_bounds(args) -> int:
    params = bounds_mod.BoundParams(
        lam=bounds_mod.LRS_LAMBDA if args.lrs else bounds_mod.SELBERG_LAMBDA
    )
    cs = bounds_mod.enumerate_candidates(
        Fraction(args.max_gn),
        params,
        d_max=args.d_max,
        n_max=args.n_max,
    )
    payload = {
        "max_gonality": str(cs.max_gonality),
        "lambda": str(params.lam),
        "support_bound": cs.support_bound,
        "prime_bound": cs.prime_bound,
        "volume_bound": str(cs.psi_bound),
        "pairs_in_window": len(cs.pairs),
        "window_truncated": cs.truncated,
    }
    if args.format == "json":
        payload["pairs"] = cs.pairs[: args.limit]
        print(json.dumps(payload, indent=1))
    else:
        for k, v in payload.items():
            print(f"{k}\t{v}")
        for D, N in cs.pairs[: args.limit]:
            print(f"{D}\t{N}")
    return EXIT_OK


def cmd_fetch(args) -> int:
    if not args.cache_dir:
        print("fetch needs --cache-dir", file=sys.stderr)
        return EXIT_ERROR
    client = LmfdbClient(args.cache_dir, offline=False)
    levels = _parse_levels(args.levels)
    try:
        manifest = client.snapshot_fixtures(levels)
    except TransportError as e:
        print(str(e), file=sys.stderr)
        return EXIT_ERROR
    print(f"pinned {len(manifest.entries)} queries into {args.cache_dir}")
    return EXIT_OK


def _parse_levels(spec: str) -> list[int]:
    out = []
    for part in spec.split(","):
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def main(argv=None) -> int:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--cache-dir",
        default=argparse.SUPPRESS,
        help="use the live client with this cache directory",
    )
    common.add_argument(
        "--offline", action="store_true", default=argparse.SUPPRESS
    )
    common.add_argument("--fixture-bundle", default=argparse.SUPPRESS)
    common.add_argument(
        "--format", choices=["text", "json", "tsv"], default=argparse.SUPPRESS
    )
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS)

    ap = argparse.ArgumentParser(
        prog="shimtril",
        description="goodness classification for quaternionic Shimura "
        "curves over Q via trilinear-form criteria",
        parents=[common],
    )
    sub = ap.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("classify", help="classification tables", parents=[common])
    c.add_argument("family", choices=["x0", "x1", "xfull", "quat", "quat-a"])
    c.add_argument("--max-n", type=int, default=None)
    c.add_argument("--d", default=None, help="comma list of discriminants")
    c.set_defaults(func=cmd_classify)

    t = sub.add_parser("triple", help="verdict for one triple of newforms", parents=[common])
    t.add_argument("labels", nargs=3)
    t.add_argument("--d", type=int, default=1)
    t.add_argument("--n", type=int, default=1)
    t.add_argument("--a", type=int, default=None)
    t.add_argument("--gamma1", action="store_true")
    t.set_defaults(func=cmd_triple)

    g = sub.add_parser("genus", help="genus of a curve", parents=[common])
    g.add_argument("--d", type=int, default=1)
    g.add_argument("--n", type=int, default=1)
    g.add_argument("--a", type=int, default=None)
    g.add_argument("--full", type=int, default=1, help="full-congruence part")
    g.add_argument("--gamma1", action="store_true")
    g.add_argument("--x", action="store_true", help="non-projectivized")
    g.set_defaults(func=cmd_genus)

    b = sub.add_parser("bounds", help="candidate enumeration below a gonality", parents=[common])
    b.add_argument("--max-gn", default="2")
    b.add_argument("--lrs", action="store_true")
    b.add_argument("--d-max", type=int, default=None)
    b.add_argument("--n-max", type=int, default=None)
    b.add_argument("--limit", type=int, default=1000)
    b.set_defaults(func=cmd_bounds)

    f = sub.add_parser("fetch", help="pin upstream queries into the cache", parents=[common])
    f.add_argument("--levels", required=True, help="e.g. 1..100 or 11,37")
    f.set_defaults(func=cmd_fetch)

    args = ap.parse_args(argv)
    # the shared options use suppressed defaults so that values given on
    # either side of the subcommand survive; fill the gaps here
    for key, value in {
        "cache_dir": os.environ.get("SHIMTRIL_CACHE"),
        "offline": False,
        "fixture_bundle": None,
        "format": "tsv",
        "jobs": 1,
    }.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    try:
        return args.func(args)
    except CacheMissError as e:
        print(str(e), file=sys.stderr)
        return EXIT_DATA
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
