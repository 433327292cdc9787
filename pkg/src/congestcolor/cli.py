"""Command line front end.

Three subcommands.  `run` colors one graph (loaded or generated) and
prints a JSON stats object; `verify` checks a coloring file against an
instance file; `bench` runs a suite of generated graphs and prints one
CSV row each, with the round count normalized by the bound
D * ceil(log2 C) * (ceil(log2 K) + ceil(log2 Delta) + ceil(log2 W)).

Generator specs are comma-separated, `kind,key=value,...`, for example
`gnp,n=200,p=0.05`.  Values parse as int first, then float.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from fractions import Fraction

from .decomposition import (
    color_with_decomposition,
    generate_decomposition,
    load_decomposition,
)
from .graphs import (
    ValidationError,
    attach_default_lists,
    generate_graph,
    load_coloring,
    load_instance,
    save_coloring,
    verify_coloring,
)
from .pipeline import list_color_full
from .sim import AGGREGATION, ALGORITHM, BandwidthPolicy


def _parse_gen(text: str):
    kind, _, rest = text.partition(",")
    if not kind:
        raise ValueError(f"bad generator spec {text!r}")
    params = {}
    for part in filter(None, rest.split(",")):
        key, eq, value = part.partition("=")
        if not eq or not key or not value:
            raise ValueError(f"bad generator parameter {part!r}")
        try:
            params[key] = int(value)
        except ValueError:
            params[key] = float(value)
    return kind, params


def _build_instance(args):
    if args.graph is not None:
        inst = load_instance(args.graph)
        if args.colors_mode in ("degree1", "delta1"):
            inst = replace(attach_default_lists(inst.graph), psi=inst.psi)
        return inst
    if args.colors_mode == "lists":
        raise ValidationError("--colors-mode lists needs an instance file (--graph)")
    kind, params = _parse_gen(args.gen)
    return attach_default_lists(generate_graph(kind, params, args.rng_seed))


def _trace_writer(fh):
    def write(record):
        fh.write(json.dumps(record, sort_keys=True))
        fh.write("\n")

    return write


def cmd_run(args) -> int:
    inst = _build_instance(args)
    policy = BandwidthPolicy.parse(args.bandwidth)
    fh = open(args.trace, "w") if args.trace else None
    try:
        trace = _trace_writer(fh) if fh else None
        kwargs = dict(
            kmode=args.kmode,
            strategy=args.strategy,
            policy=policy,
            round_cap=args.round_cap,
            trace=trace,
            seed_cap=args.seed_cap,
        )
        if args.decomp == "off":
            coloring, reports = list_color_full(inst, args.mode, **kwargs)
            rounds = sum(rep.rounds for rep in reports)
        else:
            decomp = (
                generate_decomposition(inst.graph)
                if args.decomp == "generate"
                else load_decomposition(args.decomp)
            )
            coloring, comp = color_with_decomposition(inst, decomp, args.mode, **kwargs)
            reports = [
                rep for rec in comp.classes for reps in rec.reports for rep in reps
            ]
            rounds = comp.rounds
    finally:
        if fh is not None:
            fh.close()
    assert verify_coloring(inst, coloring).ok, "run produced an invalid coloring"
    if args.colors_mode == "delta1":
        delta = inst.graph.max_degree
        assert all(
            c <= delta for c in coloring.colors
        ), "delta1 run used a color above the max degree"
    if args.out:
        save_coloring(args.out, coloring)
    stats = {
        "n": inst.graph.n,
        "colored": len(coloring.colored()),
        "phases": len(reports),
        "rounds": rounds,
        "messages": sum(rep.stats.messages for rep in reports),
        "max_bits": {
            category: max(
                (rep.stats.max_bits_by_category.get(category, 0) for rep in reports),
                default=0,
            )
            for category in (ALGORITHM, AGGREGATION)
        },
    }
    print(json.dumps(stats, sort_keys=True))
    return 0


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    coloring = load_coloring(args.coloring)
    report = verify_coloring(inst, coloring)
    if report.ok:
        print("ok")
        return 0
    if report.monochromatic:
        u, v = report.monochromatic[0]
        print(f"violation: edge ({u}, {v}) is monochromatic")
    elif report.out_of_list:
        print(f"violation: node {report.out_of_list[0]} has a color outside its list")
    else:
        print(f"violation: node {report.uncolored[0]} is uncolored")
    return 1


def _ceil_log2(x: int) -> int:
    return (max(1, x) - 1).bit_length()


def _bench_ratio(inst, reports, rounds) -> str:
    width = max(1, (inst.C - 1).bit_length())
    k_start = reports[0].k_classes if reports else 1
    term = _ceil_log2(k_start) + _ceil_log2(inst.graph.max_degree) + _ceil_log2(width)
    bound = max(1, inst.graph.diameter) * width * max(1, term)
    ratio = Fraction(rounds, bound)
    return f"{ratio.numerator}/{ratio.denominator}"


def cmd_bench(args) -> int:
    with open(args.suite) as fh:
        spec = json.load(fh)
    if isinstance(spec, list):
        items, mode, kmode = spec, "mis", "linial"
    else:
        items = spec["graphs"]
        mode = spec.get("mode", "mis")
        kmode = spec.get("kmode", "linial")
    header = ["n", "delta", "C", "phases", "rounds", "max_bits", "ratio"]
    if not args.no_time:
        header.append("wall_ms")
    lines = [",".join(header)]
    for item in items:
        gen = item if isinstance(item, str) else item["gen"]
        seed = args.rng_seed if isinstance(item, str) else item.get("seed", args.rng_seed)
        kind, params = _parse_gen(gen)
        inst = attach_default_lists(generate_graph(kind, params, seed))
        start = time.perf_counter()
        _, reports = list_color_full(inst, mode, kmode)
        wall_ms = round(1000 * (time.perf_counter() - start))
        rounds = sum(rep.rounds for rep in reports)
        max_bits = max(
            (rep.stats.max_bits_by_category.get(ALGORITHM, 0) for rep in reports),
            default=0,
        )
        row = [
            inst.graph.n,
            inst.graph.max_degree,
            inst.C,
            len(reports),
            rounds,
            max_bits,
            _bench_ratio(inst, reports, rounds),
        ]
        if not args.no_time:
            row.append(wall_ms)
        lines.append(",".join(str(cell) for cell in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="congestcolor",
        description="deterministic distributed list coloring on a simulated network",
    )
    sub = top.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="color one graph, print stats as JSON")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--graph", help="instance file (JSON: n, edges, lists?, C?, psi?)")
    source.add_argument("--gen", help="generator spec, e.g. gnp,n=200,p=0.05")
    run.add_argument(
        "--colors-mode",
        choices=("lists", "degree1", "delta1"),
        default="degree1",
        help="lists: use the file's lists; degree1: list {0..deg(v)} per node; "
        "delta1: same lists, plus a check that no color exceeds the max degree",
    )
    run.add_argument("--mode", choices=("mis", "avoid-mis"), default="mis")
    run.add_argument("--kmode", choices=("linial", "ids"), default="linial")
    run.add_argument(
        "--strategy", choices=("conditional", "exhaustive"), default="conditional"
    )
    run.add_argument(
        "--decomp", default="off", help="off, generate, or a decomposition file"
    )
    run.add_argument("--bandwidth", default="measure", help='"measure" or "strict:BETA"')
    run.add_argument("--trace", help="write JSON-lines trace records to this file")
    run.add_argument("--out", help="write the coloring to this file")
    run.add_argument("--rng-seed", type=int, default=0)
    run.add_argument("--round-cap", type=int)
    run.add_argument("--seed-cap", type=int)
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="check a coloring file against an instance")
    ver.add_argument("instance")
    ver.add_argument("coloring")
    ver.set_defaults(func=cmd_verify)

    bench = sub.add_parser("bench", help="run a generated suite, print CSV")
    bench.add_argument(
        "suite", help="JSON file: a list of generator specs, or {graphs, mode, kmode}"
    )
    bench.add_argument(
        "--no-time", action="store_true", help="omit wall_ms so output is reproducible"
    )
    bench.add_argument("--out", help="write the CSV to this file instead of stdout")
    bench.add_argument("--rng-seed", type=int, default=0)
    bench.set_defaults(func=cmd_bench)
    return top


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, LookupError, RuntimeError, AssertionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
