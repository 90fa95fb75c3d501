"""mulab.graph

Undirected simple graphs on {0..n-1} stored as fixed-width adjacency bit rows.

A row is a Python int whose bit v is set iff the vertex is adjacent to v.
Vertex sets are plain int masks (``VertexSet``); the helpers here are the only
place that walks bits, so the rest of the package can stay mask-oriented.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

import numpy as np

VertexSet = int


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> VertexSet:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def full_mask(n: int) -> VertexSet:
    return (1 << n) - 1


@dataclass(frozen=True)
class Graph:
    """
    Simple undirected graph.

    - n: vertex count
    - rows: n adjacency rows; bit v of rows[u] is set iff u ~ v

    Invariants (checked by ``validate``): symmetry, no loops, no bits at
    positions >= n.
    """

    n: int
    rows: Tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        if len(self.rows) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(self.rows)}")

    def validate(self) -> "Graph":
        n = self.n
        for u, r in enumerate(self.rows):
            if r < 0 or r >> n:
                raise ValueError(f"row {u} has bits outside 0..{n - 1}")
            if (r >> u) & 1:
                raise ValueError(f"loop at vertex {u}")
            for v in iter_bits(r):
                if not (self.rows[v] >> u) & 1:
                    raise ValueError(f"asymmetric adjacency between {u} and {v}")
        return self

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.rows[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> List[int]:
        return [r.bit_count() for r in self.rows]

    def neighbors(self, v: int) -> List[int]:
        return list(iter_bits(self.rows[v]))

    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def edges(self) -> List[Tuple[int, int]]:
        out: List[Tuple[int, int]] = []
        for u, r in enumerate(self.rows):
            for v in iter_bits(r >> (u + 1)):
                out.append((u, u + 1 + v))
        return out

    def edges_within(self, s: VertexSet) -> int:
        return sum((self.rows[v] & s).bit_count() for v in iter_bits(s)) // 2

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.edge_count()})"


def from_edges(n: int, edges: Iterable[Tuple[int, int]]) -> Graph:
    rows = [0] * n
    for u, v in edges:
        if u == v:
            raise ValueError(f"loop at vertex {u}")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) outside 0..{n - 1}")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(n, tuple(rows))


def empty_graph(n: int) -> Graph:
    return Graph(n, (0,) * n)


def complete_graph(n: int) -> Graph:
    full = full_mask(n)
    return Graph(n, tuple(full ^ (1 << v) for v in range(n)))


def path_graph(n: int) -> Graph:
    return from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def make_comb(n: int) -> Graph:
    """Path v_0..v_{n-1} (labels 0..n-1) with a pendant tooth n+i hanging from each v_i."""
    if n < 1:
        raise ValueError("comb needs n >= 1")
    edges = [(i, i + 1) for i in range(n - 1)]
    edges.extend((i, n + i) for i in range(n))
    return from_edges(2 * n, edges)


def complement(g: Graph) -> Graph:
    full = full_mask(g.n)
    return Graph(g.n, tuple(full ^ r ^ (1 << v) for v, r in enumerate(g.rows)))


def induced_subgraph(g: Graph, s: VertexSet) -> Graph:
    """Subgraph on the members of ``s``, relabelled 0..|s|-1 in ascending order."""
    members = list(iter_bits(s))
    index = {v: i for i, v in enumerate(members)}
    rows = []
    for v in members:
        r = g.rows[v] & s
        out = 0
        while r:
            low = r & -r
            out |= 1 << index[low.bit_length() - 1]
            r ^= low
        rows.append(out)
    return Graph(len(members), tuple(rows))


def permute(g: Graph, perm: Sequence[int]) -> Graph:
    """Relabel vertex v as perm[v]."""
    rows = [0] * g.n
    for v, r in enumerate(g.rows):
        rows[perm[v]] = mask_of(perm[u] for u in iter_bits(r))
    return Graph(g.n, tuple(rows))


def disjoint_union(*graphs: Graph) -> Graph:
    rows: List[int] = []
    offset = 0
    for h in graphs:
        rows.extend(r << offset for r in h.rows)
        offset += h.n
    return Graph(offset, tuple(rows))


def components(g: Graph, within: VertexSet = -1) -> List[VertexSet]:
    """Connected components (as masks) of g restricted to ``within``, ordered by least vertex."""
    remaining = full_mask(g.n) if within < 0 else within
    rows = g.rows
    out: List[VertexSet] = []
    while remaining:
        low = remaining & -remaining
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= rows[v]
            nxt &= remaining & ~comp
            comp |= nxt
            frontier = nxt
        out.append(comp)
        remaining &= ~comp
    return out


def component_labels(g: Graph) -> List[int]:
    labels = [0] * g.n
    for cid, comp in enumerate(components(g)):
        for v in iter_bits(comp):
            labels[v] = cid
    return labels


def is_regular(g: Graph) -> bool:
    degs = g.degrees()
    return all(d == degs[0] for d in degs)


def adjacency_matrix(g: Graph) -> "np.ndarray":
    """Dense 0/1 uint8 matrix of g."""
    width = (g.n + 7) // 8
    if g.n == 0:
        return np.zeros((0, 0), dtype=np.uint8)
    raw = np.frombuffer(b"".join(r.to_bytes(width, "little") for r in g.rows), dtype=np.uint8)
    return np.unpackbits(raw.reshape(g.n, width), axis=1, bitorder="little")[:, : g.n]


def from_matrix(adj: "np.ndarray") -> Graph:
    """Graph from a symmetric boolean/0-1 matrix with zero diagonal."""
    packed = np.packbits(np.asarray(adj, dtype=bool), axis=1, bitorder="little")
    return Graph(adj.shape[0], tuple(int.from_bytes(packed[i].tobytes(), "little") for i in range(adj.shape[0])))


def adjacency_lists(g: Graph, within: VertexSet = -1) -> Dict[int, List[int]]:
    s = full_mask(g.n) if within < 0 else within
    return {v: list(iter_bits(g.rows[v] & s)) for v in iter_bits(s)}
