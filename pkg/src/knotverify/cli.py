"""Command line interface: ``knotverify <subcommand> ...``."""

from __future__ import annotations

import argparse
import os
import sys

from .bracket import bracket, jones_f
from .determinant import determinant_goeritz
from .generation import candidates
from .pd import format_pd, parse_pd, pd_validate
from .pipeline import (
    AbortRun,
    CheckpointError,
    RunConfig,
    export_flagged,
    read_records,
    run_verification,
)
from .reduction import reduce_fixpoint
from .tangles import default_catalog, load_catalog


def _read_pd(arg: str | None):
    text = arg if arg not in (None, "-") else sys.stdin.read()
    d = parse_pd(text)
    problems = pd_validate(d)
    if problems:
        raise SystemExit(f"invalid diagram: {', '.join(problems)}")
    return d


def _shard(text: str) -> tuple[int, int]:
    try:
        i, k = (int(x) for x in text.split("/"))
    except ValueError:
        raise argparse.ArgumentTypeError("shard must look like i/k") from None
    if k < 1 or not 0 <= i < k:
        raise argparse.ArgumentTypeError("shard index must satisfy 0 <= i < k")
    return i, k


def _classes(text: str) -> tuple[str, ...]:
    if text == "both":
        return ("algebraic", "polyhedral")
    if text in ("algebraic", "polyhedral"):
        return (text,)
    raise argparse.ArgumentTypeError("class must be algebraic, polyhedral or both")


def cmd_generate(args) -> int:
    classes = args.cls
    catalog = []
    if "polyhedral" in classes:
        catalog = load_catalog(args.catalog) if args.catalog else default_catalog()
    for cand in candidates(classes, args.max_crossings, catalog, args.shard):
        if args.budget_only and cand.budget != args.max_crossings:
            continue
        pd = "-" if cand.diagram is None else format_pd(cand.diagram)
        print(f"{cand.src}\t{cand.label}\t{pd}")
    return 0


def cmd_reduce(args) -> int:
    d = _read_pd(args.pd)
    trace: list = []
    out = reduce_fixpoint(d, args.max_bridge, trace=trace)
    if args.trace:
        for step in trace:
            print(step.describe(), file=sys.stderr)
    print(format_pd(out))
    return 0


def cmd_det(args) -> int:
    print(determinant_goeritz(_read_pd(args.pd)))
    return 0


def cmd_bracket(args) -> int:
    d = _read_pd(args.pd)
    br = bracket(d)
    print(f"bracket: {br.format('A')}")
    print(f"f: {jones_f(d, br).format('A')}")
    return 0


def cmd_verify(args) -> int:
    cfg = RunConfig(
        max_crossings=args.max_crossings,
        classes=args.cls,
        shard=args.shard,
        catalog_path=args.catalog,
        checkpoint=args.checkpoint,
        out=args.out,
        max_bridge=args.max_bridge,
        progress=args.progress,
        jobs=args.jobs,
        abort_after=args.abort_after,
    )
    try:
        report = run_verification(cfg)
    except AbortRun as exc:
        print(f"aborted: {exc}", file=sys.stderr)
        return 2
    except (OSError, CheckpointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(report.summary(), file=sys.stderr)
    c = report.counters
    return 1 if (c["flagged"] or c["unresolved"]) else 0


def cmd_export(args) -> int:
    n = export_flagged(read_records(args.records), args.format, args.out)
    print(f"exported {n} flagged diagram(s)", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="knotverify", description="Knot diagram verification pipeline.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="list candidate diagrams")
    g.add_argument("--max-crossings", type=int, required=True)
    g.add_argument("--class", dest="cls", type=_classes, default=("algebraic",))
    g.add_argument("--catalog")
    g.add_argument("--shard", type=_shard, default=(0, 1))
    g.add_argument("--budget-only", action="store_true", help="only the largest budget")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("reduce", help="simplify a PD code by pass moves")
    r.add_argument("pd", nargs="?", help="PD text (default: stdin)")
    r.add_argument("--max-bridge", type=int)
    r.add_argument("--trace", action="store_true")
    r.set_defaults(func=cmd_reduce)

    d = sub.add_parser("det", help="knot determinant of a PD code")
    d.add_argument("pd", nargs="?")
    d.set_defaults(func=cmd_det)

    b = sub.add_parser("bracket", help="bracket and f-polynomial of a PD code")
    b.add_argument("pd", nargs="?")
    b.set_defaults(func=cmd_bracket)

    v = sub.add_parser("verify", help="run the verification pipeline")
    v.add_argument("--max-crossings", type=int, required=True)
    v.add_argument("--class", dest="cls", type=_classes, default=("algebraic",))
    v.add_argument("--shard", type=_shard, default=(0, 1))
    v.add_argument("--catalog")
    v.add_argument("--checkpoint")
    v.add_argument("--out", default="records.txt")
    v.add_argument("--max-bridge", type=int)
    v.add_argument("--progress", type=int, default=0, metavar="N")
    v.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    v.add_argument("--abort-after", type=int, metavar="N", help="stop each worker after N candidates")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("export", help="export flagged diagrams")
    e.add_argument("--records", required=True)
    e.add_argument("--format", choices=("pd", "dt"), default="pd")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
