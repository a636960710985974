"""Command-line interface: ``kgcalc <subcommand> ...``.

Exit status: 0 on success (an OBSTRUCTED verdict is data, not an error),
2 on malformed input or exceeded guard limits, 3 when an internal
consistency check fails.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys

from .coeffs import parse_coeff
from .enumeration import DEFAULT_MAX_AERIAL, FILTERS, GuardLimitExceeded, basis, enumerate_graphs
from .graphs import GraphError, canonicalize, encode_graph, has_directed_cycle, parse_graph
from .linalg import BigradeMismatch, RelationSystem
from .oracle import evaluate_series, format_poly, parse_bivector, parse_poly
from .pipeline import KnownFactCheckError, run_pipeline
from .relations import coboundary_rows, generate_jacobi_relations, jacobi_rows, membership
from .series import (
    GraphSeries,
    format_series,
    gauge_exp,
    gerstenhaber_bracket,
    mc_residual,
    parse_series,
    series_sum,
    split_by_order,
)


class InputError(ValueError):
    pass


def _read_text(arg: str) -> str:
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def read_series(arg: str) -> GraphSeries:
    """A file path or inline text; a bare graph line means coefficient 1."""
    text = _read_text(arg)
    if " * k " not in text and text.strip().startswith("k "):
        return GraphSeries.from_graph(parse_graph(text.strip()))
    return parse_series(text)


# ----------------------------------------------------------------------------
# relation system files


def format_system(system: RelationSystem) -> str:
    n, m = system.bigrade
    out = [f"system {system.name}", f"bigrade {n} {m}", f"rows {system.n_rows}", f"rank {system.rank}"]
    for i, label in enumerate(system.labels):
        out.append("")
        out.append(f"row {label}")
        out.append(format_series(system.row_series(i)).rstrip("\n"))
    return "\n".join(out) + "\n"


def parse_system(text: str) -> RelationSystem:
    header: dict = {}
    rows: list = []
    label, body = None, []

    def flush():
        if label is not None:
            rows.append((label, parse_series("\n".join(body))))

    for raw in text.splitlines():
        line = raw.strip()
        if label is None and not rows and re.match(r"^(system|bigrade|rows|rank)\b", line):
            key, _, value = line.partition(" ")
            header[key] = value
        elif line.startswith("row "):
            flush()
            label, body = line[4:], []
        elif line and label is not None:
            body.append(line)
        elif line and not line.startswith("#"):
            raise InputError(f"unexpected line in relation file: {line!r}")
    flush()
    if "bigrade" not in header:
        raise InputError("relation file lacks a 'bigrade <n> <m>' header")
    n, m = (int(t) for t in header["bigrade"].split())
    return RelationSystem(basis(n, m), rows, name=header.get("system", ""))


_SYSTEM_SPEC = re.compile(r"^([a-z+]+):(\d+),(\d+)$")


def load_system(arg: str) -> RelationSystem:
    """``jacobi:N,M``, ``coboundary:N,M``, ``jacobi+coboundary:N,M`` or a relation file."""
    m = _SYSTEM_SPEC.match(arg)
    if not m or os.path.isfile(arg):
        return parse_system(_read_text(arg))
    kinds = m.group(1).split("+")
    n, g = int(m.group(2)), int(m.group(3))
    rows = []
    for kind in kinds:
        if kind == "jacobi":
            rows += jacobi_rows(n, g)
        elif kind == "coboundary":
            rows += coboundary_rows(n, g)
        else:
            raise InputError(f"unknown relation kind {kind!r}")
    return RelationSystem(basis(n, g), rows, name=f"{m.group(1)}({n},{g})")


# ----------------------------------------------------------------------------
# subcommands


def cmd_canon(a) -> int:
    c = canonicalize(parse_graph(a.graph))
    print("0" if c.sign == 0 else f"{c.sign} * {encode_graph(c.graph)}")
    return 0


def cmd_cycles(a) -> int:
    print("true" if has_directed_cycle(parse_graph(a.graph)) else "false")
    return 0


def cmd_enumerate(a) -> int:
    name = a.family
    filters = [FILTERS[name]] if name else []
    graphs = enumerate_graphs(
        a.aerial,
        a.ground,
        filters,
        up_to_ground_order=name in ("hkr", "loopy-hkr"),
        max_aerial=a.max_aerial,
    )
    print(f"count={len(graphs)} bigrade=({a.aerial},{a.ground})")
    for g in graphs:
        print(encode_graph(g))
    return 0


def cmd_bracket(a) -> int:
    sys.stdout.write(format_series(gerstenhaber_bracket(read_series(a.series_a), read_series(a.series_b))))
    return 0


def cmd_mc_check(a) -> int:
    parts = split_by_order(read_series(a.series))
    res = mc_residual(parts, a.order)
    if a.modulo_jacobi and res:
        res = generate_jacobi_relations(a.order, 3).reduce(res)
    print(f"# residual order {a.order}: {'zero' if res.is_zero() else 'nonzero'}")
    sys.stdout.write(format_series(res))
    return 0


def cmd_gauge(a) -> int:
    out = gauge_exp(read_series(a.graph), parse_coeff(a.param), read_series(a.series), a.max_order)
    sys.stdout.write(format_series(series_sum(out)))
    return 0


def cmd_relations(a) -> int:
    if a.coboundary:
        rows, name = coboundary_rows(a.aerial, a.ground), "coboundary"
    else:
        rows, name = jacobi_rows(a.aerial, a.ground), "jacobi"
    system = RelationSystem(basis(a.aerial, a.ground), rows, name=f"{name}({a.aerial},{a.ground})")
    sys.stdout.write(format_system(system))
    return 0


def cmd_reduce(a) -> int:
    x = read_series(a.series)
    system = load_system(a.mod)
    cert = membership(x, system)
    nf = system.reduce(x)
    if a.format == "json":
        doc = cert.to_dict()
        doc["normal_form"] = format_series(nf).splitlines()
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        sys.stdout.write("".join(f"# {ln}\n" for ln in cert.to_text().splitlines()))
        sys.stdout.write(format_series(nf))
    return 0


def cmd_evaluate(a) -> int:
    pi = parse_bivector(_read_text(a.bivector), poisson=a.poisson)
    args = [parse_poly(p, pi.d) for p in a.args.split(",")] if a.args.strip() else []
    print(format_poly(evaluate_series(read_series(a.series), pi, args)))
    return 0


def cmd_obstruction(a) -> int:
    report = run_pipeline(samples=a.samples, strict=a.strict)
    if a.report:
        with open(a.report, "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
    sys.stdout.write(report.to_json() if a.format == "json" else report.to_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kgcalc", description="Kontsevich graph calculus")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("canon", help="signed canonical form of a graph line")
    s.add_argument("graph")
    s.set_defaults(func=cmd_canon)

    s = sub.add_parser("cycles", help="whether a graph has a directed cycle")
    s.add_argument("graph")
    s.set_defaults(func=cmd_cycles)

    s = sub.add_parser("enumerate", help="list canonical graphs of a bigrade")
    s.add_argument("--aerial", type=int, required=True)
    s.add_argument("--ground", type=int, required=True)
    fam = s.add_mutually_exclusive_group()
    for flag in ("loopless", "hkr", "loopy-hkr"):
        fam.add_argument(f"--{flag}", dest="family", action="store_const", const=flag)
    s.add_argument("--max-aerial", type=int, default=DEFAULT_MAX_AERIAL)
    s.set_defaults(func=cmd_enumerate, family=None)

    s = sub.add_parser("bracket", help="Gerstenhaber bracket of two series")
    s.add_argument("series_a")
    s.add_argument("series_b")
    s.set_defaults(func=cmd_bracket)

    s = sub.add_parser("mc-check", help="Maurer-Cartan residual at one order")
    s.add_argument("series")
    s.add_argument("--order", type=int, required=True)
    s.add_argument("--modulo-jacobi", action="store_true", help="reduce modulo Jacobi relations with 3 ground vertices")
    s.set_defaults(func=cmd_mc_check)

    s = sub.add_parser("gauge", help="apply exp(t [L, .]) to a series")
    s.add_argument("series")
    s.add_argument("--graph", required=True)
    s.add_argument("--param", required=True)
    s.add_argument("--max-order", type=int, required=True)
    s.set_defaults(func=cmd_gauge)

    s = sub.add_parser("relations", help="write a relation system")
    s.add_argument("--aerial", type=int, required=True)
    s.add_argument("--ground", type=int, required=True)
    kind = s.add_mutually_exclusive_group()
    kind.add_argument("--jacobi", action="store_true")
    kind.add_argument("--coboundary", action="store_true")
    s.set_defaults(func=cmd_relations)

    s = sub.add_parser("reduce", help="normal form and membership certificate")
    s.add_argument("series")
    s.add_argument("--mod", required=True, help="relation file or jacobi[+coboundary]:N,M")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("evaluate", help="evaluate a series on polynomials")
    s.add_argument("series")
    s.add_argument("--bivector", required=True)
    s.add_argument("--args", required=True, help="comma-separated polynomials in x1..xd")
    s.add_argument("--poisson", action="store_true", help="check the Jacobi identity of the bivector")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("obstruction", help="run the order-3 obstruction pipeline")
    s.add_argument("--report", help="also write the JSON report to this path")
    s.add_argument("--format", choices=("text", "json"), default="text")
    s.add_argument("--samples", type=int, default=5)
    s.add_argument("--strict", action="store_true", help="abort if the residue misses the two-graph display")
    s.set_defaults(func=cmd_obstruction)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (KnownFactCheckError, AssertionError) as e:
        print(f"error: internal check failed: {e}", file=sys.stderr)
        return 3
    except (GraphError, InputError, BigradeMismatch, GuardLimitExceeded, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
