"""mulab.codec

Text formats for graphs, trees and core decompositions.

- graph6: the standard compact ASCII encoding (optional ``>>graph6<<`` header,
  one graph per line)
- edge list: one ``u v`` pair per line, 0-indexed, ``#`` comments, optional
  ``# n=<count>`` header for trailing isolated vertices
- trees: parent-array lines (``-1`` marks the root)
- decompositions: ``n``, ``core``, ``e`` and ``t`` records (see ``dump_decomposition``)

Graph input autodetects the format from its first significant byte: a digit or
``#`` means an edge list, anything else graph6.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import networkx as nx

from .anatomy import CoreDecomposition, TypeTuple, type_tuple
from .errors import GraphFormatError
from .graph import Graph, from_edges, iter_bits
from .trees import RootedTree, parse_ahu

GRAPH6_HEADER = ">>graph6<<"
_G6_LARGE = (1 << 36) - 1


# ---------------------------------------------------------------------------
# graph6
# ---------------------------------------------------------------------------


def _to_nx(g: Graph) -> "nx.Graph":
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def to_graph6(g: Graph, *, header: bool = False) -> str:
    """graph6 text for g (no trailing newline)."""
    if g.n > _G6_LARGE:
        raise GraphFormatError(f"graph6 cannot encode n={g.n}")
    return nx.to_graph6_bytes(_to_nx(g), header=header).decode("ascii").rstrip("\n")


def from_graph6(text: Union[str, bytes]) -> Graph:
    """Decode one graph6 line (header optional, surrounding whitespace ignored)."""
    data = text.encode("ascii") if isinstance(text, str) else bytes(text)
    data = data.strip()
    if data.startswith(GRAPH6_HEADER.encode("ascii")):
        data = data[len(GRAPH6_HEADER) :]
    if not data:
        raise GraphFormatError("empty graph6 string")
    bad = next((b for b in data if not 63 <= b <= 126), None)
    if bad is not None:
        raise GraphFormatError(f"byte {bad} outside the graph6 range")
    try:
        h = nx.from_graph6_bytes(data)
    except (nx.NetworkXError, ValueError, IndexError) as exc:
        raise GraphFormatError(f"bad graph6 string {data[:16]!r}: {exc}") from None
    return from_edges(h.number_of_nodes(), h.edges())


# ---------------------------------------------------------------------------
# Edge lists
# ---------------------------------------------------------------------------


def to_edge_list(g: Graph) -> str:
    lines = [f"# n={g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def from_edge_list(text: str) -> Graph:
    n: Optional[int] = None
    edges: List[Tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip().replace(" ", "")
            if body.startswith("n="):
                try:
                    n = int(body[2:])
                except ValueError:
                    raise GraphFormatError(f"line {lineno}: bad vertex count header {raw!r}") from None
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex in {raw!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: negative vertex in {raw!r}")
        edges.append((u, v))
    top = max((max(e) for e in edges), default=-1) + 1
    if n is None:
        n = top
    elif n < top:
        raise GraphFormatError(f"header says n={n} but an edge uses vertex {top - 1}")
    try:
        return from_edges(n, edges)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Autodetect / IO
# ---------------------------------------------------------------------------


def detect_format(text: str) -> str:
    """"edges" or "graph6", from the first non-whitespace character."""
    stripped = text.lstrip()
    if not stripped:
        return "edges"
    first = stripped[0]
    return "edges" if first.isdigit() or first == "#" else "graph6"


def parse_graphs(text: str) -> List[Graph]:
    """All graphs in ``text``: one per non-empty graph6 line, or a single edge list."""
    if detect_format(text) == "edges":
        return [from_edge_list(text)]
    return [from_graph6(line) for line in text.splitlines() if line.strip()]


def parse_graph(text: str) -> Graph:
    graphs = parse_graphs(text)
    if len(graphs) != 1:
        raise GraphFormatError(f"expected exactly one graph, found {len(graphs)}")
    return graphs[0]


def read_text(path: Union[str, Path]) -> str:
    """File contents, or stdin for ``-``."""
    if str(path) == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="ascii")
    except UnicodeDecodeError as exc:
        raise GraphFormatError(f"{path}: not ASCII text") from exc


def read_graph(path: Union[str, Path]) -> Graph:
    return parse_graph(read_text(path))


def format_graph(g: Graph, fmt: str = "graph6") -> str:
    if fmt == "graph6":
        return to_graph6(g) + "\n"
    if fmt == "edges":
        return to_edge_list(g)
    raise GraphFormatError(f"unknown graph format {fmt!r}")


# ---------------------------------------------------------------------------
# Trees
# ---------------------------------------------------------------------------


def tree_to_line(t: RootedTree) -> str:
    return " ".join(str(p) for p in t.parents())


def tree_from_line(line: str) -> RootedTree:
    try:
        parents = [int(tok) for tok in line.split()]
    except ValueError:
        raise GraphFormatError(f"parent array must be integers: {line!r}") from None
    return RootedTree.from_parents(parents)


def parse_trees(text: str) -> List[RootedTree]:
    """Parent-array or AHU lines, one tree per line; ``#`` lines are comments."""
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append(parse_ahu(line) if line.startswith("(") else tree_from_line(line))
    return out


# ---------------------------------------------------------------------------
# Core decompositions
# ---------------------------------------------------------------------------


class DecompositionRecord(NamedTuple):
    """Parsed decomposition text: vertex count, core vertices, core edges, type tuple."""

    n: int
    core: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    types: TypeTuple


def dump_decomposition(g: Graph, dec: CoreDecomposition) -> str:
    """
    Line-based text for golden files::

        n <vertex count>
        core <k> <v_1> ... <v_k>
        e <u> <v>            one per core edge, u < v, original labels
        t <v> <ahu code>     one per core vertex, pendant tree rooted at v
    """
    core = dec.core_list()
    lines = [f"n {g.n}", " ".join(["core", str(len(core))] + [str(v) for v in core])]
    cmask = dec.core_vertices
    for u in core:
        for v in iter_bits(g.rows[u] & cmask & ~((2 << u) - 1)):
            lines.append(f"e {u} {v}")
    tt = type_tuple(g, dec)
    lines.extend(f"t {v} {code}" for v, code in zip(tt.vertices, tt.codes))
    return "\n".join(lines) + "\n"


def load_decomposition(text: str) -> DecompositionRecord:
    n = -1
    core: Tuple[int, ...] = ()
    edges: List[Tuple[int, int]] = []
    types: List[Tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        parts = raw.split()
        if not parts or parts[0].startswith("#"):
            continue
        tag = parts[0]
        try:
            if tag == "n":
                n = int(parts[1])
            elif tag == "core":
                k = int(parts[1])
                core = tuple(int(x) for x in parts[2:])
                if len(core) != k:
                    raise GraphFormatError(f"line {lineno}: core lists {len(core)} vertices, header says {k}")
            elif tag == "e":
                edges.append((int(parts[1]), int(parts[2])))
            elif tag == "t":
                parse_ahu(parts[2])
                types.append((int(parts[1]), parts[2]))
            else:
                raise GraphFormatError(f"line {lineno}: unknown record {tag!r}")
        except GraphFormatError:
            raise
        except (IndexError, ValueError):
            raise GraphFormatError(f"line {lineno}: malformed record {raw!r}") from None
    if n < 0:
        raise GraphFormatError("missing 'n' record")
    if [v for v, _ in types] != list(core):
        raise GraphFormatError("'t' records must list the core vertices in order")
    return DecompositionRecord(
        n,
        core,
        tuple(edges),
        TypeTuple(tuple(v for v, _ in types), tuple(c for _, c in types)),
    )


def write_lines(lines: Iterable[str], out: Optional[Union[str, Path]] = None) -> None:
    text = "".join(line if line.endswith("\n") else line + "\n" for line in lines)
    if out is None or str(out) == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


__all__: Sequence[str] = [
    "GRAPH6_HEADER",
    "DecompositionRecord",
    "to_graph6",
    "from_graph6",
    "to_edge_list",
    "from_edge_list",
    "detect_format",
    "parse_graphs",
    "parse_graph",
    "read_text",
    "read_graph",
    "format_graph",
    "tree_to_line",
    "tree_from_line",
    "parse_trees",
    "dump_decomposition",
    "load_decomposition",
    "write_lines",
]
