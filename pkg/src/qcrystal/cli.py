"""Command-line entry point.

Exit codes: 0 on success, 1 on invalid input, 2 when a verification fails.
Errors are written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from .cartan import DatumError, load_datum
from .crystal import CrystalError, DepthInsufficient, graph_isomorphic, tensor_graphs
from .freealg import binf, binf_data
from .globalbasis import DegreeBudgetExceeded, balanced_check, export_json, global_basis
from .harness import load_config, run_suite
from .vrep import NotDominant, crystal, crystal_data, dims_table

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _weights(values: Optional[List[str]], n: int, name: str) -> tuple:
    if values is None:
        raise UsageError(f"--{name} is required")
    parts = [p for v in values for p in v.replace(",", " ").split()]
    try:
        out = tuple(int(p) for p in parts)
    except ValueError:
        raise UsageError(f"--{name} expects integers, got {values}") from None
    if len(out) != n:
        raise UsageError(f"--{name} has {len(out)} entries for a rank-{n} datum")
    return out


def _emit(text, output: Optional[str]) -> None:
    data = text if isinstance(text, bytes) else text.encode()
    if output:
        Path(output).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _error(kind: str, message: str, **extra) -> None:
    payload = {"error": kind, "message": message}
    payload.update(extra)
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qcrystal", description="Crystal and global bases for quantum generalized Kac-Moody algebras.")
    common = _Parser(add_help=False)
    common.add_argument("--datum", default="sl2", help="datum file (JSON/TOML) or built-in name")
    common.add_argument("--depth", type=int, default=4)
    common.add_argument("--output", "-o", help="write to this file instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized sampling")
    common.add_argument("--jobs", type=int, default=1, help="parallelism hint (computation is serial)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("crystal", parents=[common], help="crystal graph B(lambda)")
    c.add_argument("--lambda", dest="lam", nargs="+")
    c.add_argument("--format", choices=["json", "dot"], default="json")
    c.add_argument("--figure", help="also render the graph to this PNG")

    b = sub.add_parser("binf", parents=[common], help="crystal graph B(infinity) up to depth")
    b.add_argument("--format", choices=["json", "dot"], default="json")
    b.add_argument("--figure")

    t = sub.add_parser("tensor", parents=[common], help="tensor product crystal B(lambda) x B(mu)")
    t.add_argument("--lambda", dest="lam", nargs="+")
    t.add_argument("--mu", nargs="+")
    t.add_argument("--mode", choices=["comb", "alg", "both"], default="both")
    t.add_argument("--format", choices=["json", "dot"], default="json")

    g = sub.add_parser("global", parents=[common], help="global basis as Laurent coefficients")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--lambda", dest="lam", nargs="+")
    src.add_argument("--binf", action="store_true")
    g.add_argument("--degree-budget", type=int, default=None)

    v = sub.add_parser("verify", parents=[common], help="run the statement suite")
    v.add_argument("--config", required=True)
    v.add_argument("--format", choices=["text", "json"], default="text")

    d = sub.add_parser("dims", parents=[common], help="CSV table of dimensions and crystal sizes")
    d.add_argument("--lambda", dest="lam", nargs="+")
    d.add_argument("--figure", help="also render a bar chart to this PNG")
    return p


def _cmd_crystal(args, datum) -> int:
    lam = _weights(args.lam, datum.n, "lambda")
    _, graph = crystal(datum, lam, args.depth)
    _emit(graph.serialize(args.format), args.output)
    if args.figure:
        from .plotting import plot_crystal

        plot_crystal(graph, args.figure, title=f"B({','.join(map(str, lam))}) {datum.name}")
    return EXIT_OK


def _cmd_binf(args, datum) -> int:
    _, graph = binf(datum, args.depth)
    _emit(graph.serialize(args.format), args.output)
    if args.figure:
        from .plotting import plot_crystal

        plot_crystal(graph, args.figure, title=f"B(inf) {datum.name}")
    return EXIT_OK


def _cmd_tensor(args, datum) -> int:
    lam = _weights(args.lam, datum.n, "lambda")
    mu = _weights(args.mu, datum.n, "mu")
    comb, alg = tensor_graphs(datum, lam, mu, args.depth)
    if args.mode == "comb":
        _emit(comb.serialize(args.format), args.output)
        return EXIT_OK
    if args.mode == "alg":
        _emit(alg.serialize(args.format), args.output)
        return EXIT_OK
    iso = graph_isomorphic(comb, alg)
    lines = [f"isomorphic: {'true' if iso.isomorphic else 'false'}", f"nodes: {len(comb.nodes)} {len(alg.nodes)}", f"edges: {len(comb.edges)} {len(alg.edges)}"]
    if iso.isomorphic:
        identical = sum(1 for k, v in (iso.witness or {}).items() if k == v)
        lines.append(f"witness: {len(iso.witness or {})} nodes matched, {identical} with equal ids")
    else:
        lines.append(f"certificate: {iso.certificate}")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if iso.isomorphic else EXIT_VERIFY


def _cmd_global(args, datum) -> int:
    if args.binf:
        data = binf_data(datum, args.depth)
        meta = {"lambda": "inf", "depth": args.depth}
    else:
        lam = _weights(args.lam, datum.n, "lambda")
        data = crystal_data(datum, lam, args.depth)
        meta = {"lambda": list(lam), "depth": args.depth}
    elems = global_basis(data, budget=args.degree_budget)
    meta["datum"] = datum.name
    _emit(export_json(elems, datum, meta), args.output)
    failed = [e.node_id for es in elems.values() for e in es if not e.ok()]
    unbalanced = [list(a) for a, es in elems.items() if not balanced_check(data, es, a).passed]
    if failed or unbalanced:
        _error("verification", "global basis certificates failed", nodes=failed, unbalanced=unbalanced)
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_verify(args, datum) -> int:
    path = Path(args.config)
    if not path.exists():
        raise UsageError(f"config {args.config} not found")
    cfg = load_config(path)
    cfg.setdefault("seed", args.seed)
    report = run_suite(cfg)
    _emit(report.to_json() if args.format == "json" else report.to_text(), args.output)
    return EXIT_OK if report.passed else EXIT_VERIFY


def _cmd_dims(args, datum) -> int:
    lam = _weights(args.lam, datum.n, "lambda")
    rows = dims_table(datum, lam, args.depth)
    header = [f"a{k + 1}" for k in range(datum.n)] + ["dim", "crystal"]
    lines = [",".join(header)]
    for alpha, d, c in rows:
        lines.append(",".join(str(x) for x in (*alpha, d, c)))
    _emit("\n".join(lines) + "\n", args.output)
    if args.figure:
        from .plotting import plot_dims

        plot_dims(rows, args.figure, title=f"V({','.join(map(str, lam))}) {datum.name}")
    return EXIT_OK if all(d == c for _, d, c in rows) else EXIT_VERIFY


COMMANDS = {
    "crystal": _cmd_crystal,
    "binf": _cmd_binf,
    "tensor": _cmd_tensor,
    "global": _cmd_global,
    "verify": _cmd_verify,
    "dims": _cmd_dims,
}


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.depth < 0:
            raise UsageError("--depth must be >= 0")
        datum = load_datum(args.datum) if args.command != "verify" else None
        return COMMANDS[args.command](args, datum)
    except DatumError as exc:
        _error("datum", str(exc), violations=[[v.row, v.col, v.rule] for v in exc.violations])
        return EXIT_INVALID
    except (UsageError, NotDominant, FileNotFoundError, KeyError, ValueError) as exc:
        _error("usage", str(exc))
        return EXIT_INVALID
    except DegreeBudgetExceeded as exc:
        _error("degree_budget", str(exc))
        return EXIT_VERIFY
    except (DepthInsufficient, CrystalError) as exc:
        _error("verification", str(exc))
        return EXIT_VERIFY


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
