#!/usr/bin/env python3
"""
CLI entrypoint for the mulab package.

    mu-lab mu exact|sample|bounds <graph-file>
    mu-lab gen gnp|regular|comb ...
    mu-lab tree count-subtrees <tree-file>
    mu-lab anatomy core <graph-file> | lambda-prime --lambda X
    mu-lab exp <name> [--spec FILE] [--set key=value ...]
    mu-lab check boring

Exit codes: 0 success, 1 verdict failure, 2 usage / input / cap errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .anatomy import conjugate_lambda, core_decompose
from .codec import dump_decomposition, format_graph, parse_graphs, parse_trees, read_text, write_lines
from .defaults import DEFAULT_FLOAT_DIGITS, DEFAULT_JSON_INDENT
from .errors import MuLabError, UsageError
from .experiments import check_boring_inequality, run_experiment
from .graph import make_comb
from .models import sample_gnp, sample_regular
from .mu import MuReport, mu_bounds, mu_exact, mu_sample_lower
from .rng import Seed, as_seed
from .runspec import PSpec, build_spec, parse_kv, spec_help
from .trees import count_subtrees_bruteforce, subtree_count_lower
from .version import __version__

__all__ = ["main"]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2


def _fmt(x: float) -> str:
    return f"{x:.{DEFAULT_FLOAT_DIGITS}g}"


def _seed(args: argparse.Namespace) -> Seed:
    try:
        return as_seed(args.seed)
    except ValueError:
        raise UsageError(f"--seed must be 'value' or 'value:stream', got {args.seed!r}") from None


def _emit(text: str, out: Optional[str]) -> None:
    if out and out != "-":
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        logger.info("wrote %s", path)
    else:
        sys.stdout.write(text)


def _report_text(reports: List[MuReport], fmt: str, plain_exact: bool = False) -> str:
    if fmt == "json":
        body = [r.to_dict() for r in reports]
        return json.dumps(body if len(body) != 1 else body[0], sort_keys=True, indent=DEFAULT_JSON_INDENT) + "\n"
    if plain_exact:
        return "".join(f"{r.exact}\n" for r in reports)
    return "".join(r.to_record() + "\n" for r in reports)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_mu(args: argparse.Namespace) -> int:
    graphs = parse_graphs(read_text(args.graph_file))
    seed = _seed(args)
    reports: List[MuReport] = []
    for i, g in enumerate(graphs):
        s = seed if len(graphs) == 1 else seed.spawn(i)
        if args.mode == "exact":
            reports.append(mu_exact(g, workers=args.workers, cap=args.cap))
        elif args.mode == "sample":
            reports.append(mu_sample_lower(g, args.samples, s, cap=args.cap))
        else:
            p_hint = PSpec.parse(args.p_hint).value(g.n) if args.p_hint else None
            reports.append(mu_bounds(g, p_hint=p_hint, seed=s, exact=args.exact, workers=args.workers))
    _emit(_report_text(reports, args.format, plain_exact=args.mode == "exact"), args.out)
    return EXIT_OK


def _cmd_gen(args: argparse.Namespace) -> int:
    seed = _seed(args)
    lines = []
    for i in range(args.count):
        s = seed if args.count == 1 else seed.spawn(i)
        if args.model == "gnp":
            g = sample_gnp(args.n, PSpec.parse(args.p).value(args.n), s)
        elif args.model == "regular":
            g = sample_regular(args.n, args.d, s)
        else:
            g = make_comb(args.n)
        lines.append(format_graph(g, args.graph_format))
    _emit("".join(lines), args.out)
    return EXIT_OK


def _cmd_tree(args: argparse.Namespace) -> int:
    rows = []
    for t in parse_trees(read_text(args.tree_file)):
        count = count_subtrees_bruteforce(t) if args.brute else subtree_count_lower(t, type_cap=args.type_cap)
        rows.append({"size": t.size, "f": count.f, "ln_f": count.ln_f, "exact": count.exact})
    if args.format == "json":
        text = json.dumps(rows, sort_keys=True, indent=DEFAULT_JSON_INDENT) + "\n"
    else:
        text = "size,f,ln_f,exact\n" + "".join(
            f"{r['size']},{r['f']},{_fmt(r['ln_f'])},{str(r['exact']).lower()}\n" for r in rows
        )
    _emit(text, args.out)
    return EXIT_OK


def _cmd_anatomy(args: argparse.Namespace) -> int:
    if args.mode == "lambda-prime":
        if args.lambda_ is None:
            raise UsageError("anatomy lambda-prime needs --lambda")
        _emit(_fmt(conjugate_lambda(args.lambda_)) + "\n", args.out)
        return EXIT_OK
    if not args.graph_file:
        raise UsageError("anatomy core needs a graph file")
    graphs = parse_graphs(read_text(args.graph_file))
    write_lines((dump_decomposition(g, core_decompose(g)) for g in graphs), args.out)
    return EXIT_OK


def _cmd_exp(args: argparse.Namespace) -> int:
    values = parse_kv(read_text(args.spec)) if args.spec else {}
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects key=value, got {item!r}")
        values[key.strip()] = value.strip()
    if args.seed is not None:
        values["seed"] = str(args.seed)
    spec = build_spec(args.name, values)
    sys.stderr.write(spec.to_text())
    result = run_experiment(spec, workers=args.workers)
    _emit(result.render(args.format), args.out)
    for line in result.verdict_lines():
        sys.stderr.write(line + "\n")
    if result.failure_count:
        sys.stderr.write(f"failed replicas: {result.failure_count}\n")
    return EXIT_OK if result.passed else EXIT_VERDICT


def _cmd_check(args: argparse.Namespace) -> int:
    check = check_boring_inequality(args.grid_points)
    if args.format == "json":
        text = json.dumps({k: v for k, v in check._asdict().items()}, sort_keys=True, indent=DEFAULT_JSON_INDENT) + "\n"
    else:
        text = (
            f"passed={str(check.passed).lower()} worst_margin={_fmt(check.worst_margin)} "
            f"worst_p={_fmt(check.worst_p)} grid_points={check.grid_points}\n"
        )
    _emit(text, args.out)
    return EXIT_OK if check.passed else EXIT_VERDICT


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=None, help="Worker processes (default: MULAB_WORKERS or 1)")
    common.add_argument("--seed", default=None, help="Seed as value or value:stream (default 0)")
    common.add_argument("--out", "-o", default=None, help="Output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="Result format")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG on stderr")

    p = argparse.ArgumentParser(
        prog="mu-lab",
        description="Count, bound and experiment with non-isomorphic induced subgraphs.",
    )
    p.add_argument("--version", action="version", version=f"mu-lab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    mu = sub.add_parser("mu", parents=[common], help="mu(G) for graphs in a graph6 or edge-list file")
    mu.add_argument("mode", choices=("exact", "sample", "bounds"))
    mu.add_argument("graph_file", help="graph6 or edge-list file, '-' for stdin")
    mu.add_argument("--cap", type=int, default=None, help="Vertex cap for exact / canonicalization")
    mu.add_argument("--samples", type=int, default=1000, help="Subset samples (sample mode)")
    mu.add_argument("--p-hint", default=None, help="Edge probability hint for bounds: c, c/n or c*ln(n)/n")
    mu.add_argument("--exact", action="store_true", help="Also compute the exact value (bounds mode)")
    mu.set_defaults(func=_cmd_mu)

    gen = sub.add_parser("gen", parents=[common], help="Generate graphs")
    gen.add_argument("model", choices=("gnp", "regular", "comb"))
    gen.add_argument("--n", type=int, required=True, help="Vertex count (comb: spine length)")
    gen.add_argument("--p", default="0.5", help="Edge probability for gnp: c, c/n or c*ln(n)/n")
    gen.add_argument("--d", type=int, default=3, help="Degree for regular")
    gen.add_argument("--count", type=int, default=1, help="Number of graphs; graph i uses seed.spawn(i) when > 1")
    gen.add_argument("--graph-format", choices=("graph6", "edges"), default="graph6")
    gen.set_defaults(func=_cmd_gen)

    tree = sub.add_parser("tree", parents=[common], help="Rooted-tree tools")
    tree.add_argument("mode", choices=("count-subtrees",))
    tree.add_argument("tree_file", help="Parent-array or AHU lines, '-' for stdin")
    tree.add_argument("--type-cap", type=int, default=None, help="Type enumeration cap before falling back to a lower bound")
    tree.add_argument("--brute", action="store_true", help="Use the brute-force oracle")
    tree.set_defaults(func=_cmd_tree)

    anatomy = sub.add_parser("anatomy", parents=[common], help="2-core decomposition and the conjugate lambda")
    anatomy.add_argument("mode", choices=("core", "lambda-prime"))
    anatomy.add_argument("graph_file", nargs="?", default=None)
    anatomy.add_argument("--lambda", dest="lambda_", type=float, default=None, help="Supercritical lambda > 1")
    anatomy.set_defaults(func=_cmd_anatomy)

    exp = sub.add_parser("exp", parents=[common], help="Run a registered experiment", epilog=spec_help(), formatter_class=argparse.RawDescriptionHelpFormatter)
    exp.add_argument("name", help="Experiment name")
    exp.add_argument("--spec", default=None, help="key=value spec file")
    exp.add_argument("--set", action="append", metavar="KEY=VALUE", help="Override one spec key (repeatable)")
    exp.set_defaults(func=_cmd_exp)

    check = sub.add_parser("check", parents=[common], help="Deterministic numeric checks")
    check.add_argument("what", choices=("boring",))
    check.add_argument("--grid-points", type=int, default=1_000_000)
    check.set_defaults(func=_cmd_check)
    return p


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else (logging.INFO if verbosity == 1 else logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"mu-lab: error: {exc}\n")
        if args.command == "exp":
            sys.stderr.write(spec_help(getattr(args, "name", None)))
        return EXIT_USAGE
    except (MuLabError, OSError) as exc:
        sys.stderr.write(f"mu-lab: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
