"""mulab.canon

Canonical certificates, isomorphism testing and automorphism counting for
small graphs.

A certificate is n as two big-endian bytes followed by the upper triangle of the
canonically relabelled adjacency matrix (row-major, i < j), packed big-endian
and zero padded. Equal certificates <=> isomorphic graphs.

Canonical labelling:

- a disconnected graph is labelled component by component, components sorted
  by (size, certificate);
- a connected graph with a disconnected complement is handled the same way on
  the complement;
- otherwise colour refinement plus individualization on the first smallest
  non-singleton cell, keeping the lexicographically smallest leaf encoding.
  Twins inside the target cell are branched on once (swapping two twins is an
  automorphism fixing the current partition).
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .defaults import DEFAULT_AUT_CAP, DEFAULT_CANON_CACHE, DEFAULT_CANON_CAP
from .errors import CapExceeded
from .graph import Graph, iter_bits, mask_of

CanonicalForm = bytes
Rows = Tuple[int, ...]
Cells = List[List[int]]


# ---------------------------------------------------------------------------
# Local helpers on (n, rows) pairs
# ---------------------------------------------------------------------------


def _local_components(n: int, rows: Rows) -> List[int]:
    remaining = (1 << n) - 1
    out: List[int] = []
    while remaining:
        comp = frontier = remaining & -remaining
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


def _complement_rows(n: int, rows: Rows) -> Rows:
    full = (1 << n) - 1
    return tuple(full ^ r ^ (1 << v) for v, r in enumerate(rows))


def _sub_rows(rows: Rows, members: List[int]) -> Rows:
    index = {v: i for i, v in enumerate(members)}
    s = mask_of(members)
    out = []
    for v in members:
        r = rows[v] & s
        x = 0
        for u in iter_bits(r):
            x |= 1 << index[u]
        out.append(x)
    return tuple(out)


def _encode(rows: Rows, order: Sequence[int]) -> int:
    code = 0
    n = len(order)
    for i in range(n):
        ri = rows[order[i]]
        for j in range(i + 1, n):
            code = (code << 1) | ((ri >> order[j]) & 1)
    return code


def _to_bytes(n: int, code: int) -> bytes:
    nbits = n * (n - 1) // 2
    nbytes = (nbits + 7) // 8
    pad = nbytes * 8 - nbits
    return n.to_bytes(2, "big") + (code << pad).to_bytes(nbytes, "big")


def _refine(rows: Rows, cells: Cells) -> Cells:
    """Equitable refinement; depends only on the ordered partition, never on labels."""
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(cells):
            splitter = mask_of(cells[i])
            new: Cells = []
            for cell in cells:
                if len(cell) == 1:
                    new.append(cell)
                    continue
                groups: Dict[int, List[int]] = {}
                for v in cell:
                    groups.setdefault((rows[v] & splitter).bit_count(), []).append(v)
                if len(groups) == 1:
                    new.append(cell)
                else:
                    changed = True
                    for k in sorted(groups):
                        new.append(groups[k])
            cells = new
            i += 1
    return cells


def _target_index(cells: Cells) -> int:
    best = -1
    size = 0
    for i, c in enumerate(cells):
        if len(c) > 1 and (best < 0 or len(c) < size):
            best, size = i, len(c)
    return best


def _individualize(rows: Rows, cells: Cells, t: int, v: int) -> Cells:
    rest = [u for u in cells[t] if u != v]
    return _refine(rows, cells[:t] + [[v], rest] + cells[t + 1 :])


def _twin_representatives(rows: Rows, cell: List[int]) -> List[int]:
    reps: List[int] = []
    for v in cell:
        bv = 1 << v
        for u in reps:
            bu = 1 << u
            if rows[u] & ~bv == rows[v] & ~bu:
                break
        else:
            reps.append(v)
    return reps


def _search(rows: Rows, cells: Cells) -> Tuple[int, Tuple[int, ...]]:
    t = _target_index(cells)
    if t < 0:
        order = tuple(c[0] for c in cells)
        return _encode(rows, order), order
    best: Optional[Tuple[int, Tuple[int, ...]]] = None
    for v in _twin_representatives(rows, cells[t]):
        leaf = _search(rows, _individualize(rows, cells, t, v))
        if best is None or leaf[0] < best[0]:
            best = leaf
    assert best is not None
    return best


def _split_canon(parts: List[int], part_rows: Rows) -> Tuple[int, ...]:
    keyed = []
    for comp in parts:
        members = list(iter_bits(comp))
        code, sub_order = _canon(len(members), _sub_rows(part_rows, members))
        keyed.append((len(members), code, tuple(members[i] for i in sub_order)))
    keyed.sort(key=lambda k: (k[0], k[1]))
    return tuple(v for _, _, order in keyed for v in order)


@lru_cache(maxsize=DEFAULT_CANON_CACHE)
def _canon(n: int, rows: Rows) -> Tuple[int, Tuple[int, ...]]:
    """(encoding, canonical order) of the local graph (n, rows)."""
    if n <= 1:
        return 0, tuple(range(n))
    comps = _local_components(n, rows)
    if len(comps) > 1:
        order = _split_canon(comps, rows)
        return _encode(rows, order), order
    crows = _complement_rows(n, rows)
    ccomps = _local_components(n, crows)
    if len(ccomps) > 1:
        order = _split_canon(ccomps, crows)
        return _encode(rows, order), order
    return _search(rows, _refine(rows, [list(range(n))]))


# ---------------------------------------------------------------------------
# Public API
# ---------------------------------------------------------------------------


def _check_cap(g: Graph, cap: Optional[int], default: int, what: str) -> None:
    limit = default if cap is None else cap
    if g.n > limit:
        raise CapExceeded(what, g.n, limit)


def canonical_order(g: Graph, *, cap: Optional[int] = None) -> Tuple[int, ...]:
    """Canonical relabelling: position i of the result holds the vertex labelled i."""
    _check_cap(g, cap, DEFAULT_CANON_CAP, "canonical_form")
    return _canon(g.n, g.rows)[1]


def canonical_form(g: Graph, *, cap: Optional[int] = None) -> CanonicalForm:
    _check_cap(g, cap, DEFAULT_CANON_CAP, "canonical_form")
    code, _ = _canon(g.n, g.rows)
    return _to_bytes(g.n, code)


def canonical_graph(g: Graph, *, cap: Optional[int] = None) -> Graph:
    order = canonical_order(g, cap=cap)
    pos = {v: i for i, v in enumerate(order)}
    rows = [0] * g.n
    for v, r in enumerate(g.rows):
        rows[pos[v]] = mask_of(pos[u] for u in iter_bits(r))
    return Graph(g.n, tuple(rows))


def are_isomorphic(g1: Graph, g2: Graph, *, cap: Optional[int] = None) -> bool:
    _check_cap(g1, cap, DEFAULT_CANON_CAP, "are_isomorphic")
    _check_cap(g2, cap, DEFAULT_CANON_CAP, "are_isomorphic")
    if g1.n != g2.n or sorted(g1.degrees()) != sorted(g2.degrees()):
        return False
    return canonical_form(g1, cap=cap) == canonical_form(g2, cap=cap)


def cache_info():
    return _canon.cache_info()


def clear_cache() -> None:
    _canon.cache_clear()


# ---------------------------------------------------------------------------
# Automorphisms
# ---------------------------------------------------------------------------


def _shape(cells: Cells) -> Tuple[int, ...]:
    return tuple(len(c) for c in cells)


def _first_path(rows: Rows, cells: Cells) -> Tuple[List[Tuple[int, ...]], Tuple[int, ...], int]:
    """Leftmost leaf: per-level partition shapes, leaf order, leaf encoding."""
    shapes = [_shape(cells)]
    while True:
        t = _target_index(cells)
        if t < 0:
            order = tuple(c[0] for c in cells)
            return shapes, order, _encode(rows, order)
        cells = _individualize(rows, cells, t, cells[t][0])
        shapes.append(_shape(cells))


def _find_leaf(rows: Rows, cells: Cells, depth: int, shapes: List[Tuple[int, ...]], target: int) -> Optional[Tuple[int, ...]]:
    if _shape(cells) != shapes[depth]:
        return None
    t = _target_index(cells)
    if t < 0:
        order = tuple(c[0] for c in cells)
        return order if _encode(rows, order) == target else None
    for v in _twin_representatives(rows, cells[t]):
        hit = _find_leaf(rows, _individualize(rows, cells, t, v), depth + 1, shapes, target)
        if hit is not None:
            return hit
    return None


def _orbit(seed: int, generators: List[Dict[int, int]]) -> set:
    orbit = {seed}
    frontier = [seed]
    while frontier:
        x = frontier.pop()
        for gen in generators:
            y = gen.get(x, x)
            if y not in orbit:
                orbit.add(y)
                frontier.append(y)
    return orbit


def _aut_search(rows: Rows, cells: Cells) -> int:
    """|Aut| of the graph restricted to automorphisms preserving ``cells``."""
    t = _target_index(cells)
    if t < 0:
        return 1
    cell = cells[t]
    v0 = cell[0]
    child = _individualize(rows, cells, t, v0)
    shapes, order0, code0 = _first_path(rows, child)
    generators: List[Dict[int, int]] = []
    bv0 = 1 << v0
    for w in cell[1:]:
        if w in _orbit(v0, generators):
            continue
        bw = 1 << w
        if rows[v0] & ~bw == rows[w] & ~bv0:
            generators.append({v0: w, w: v0})
            continue
        hit = _find_leaf(rows, _individualize(rows, cells, t, w), 0, shapes, code0)
        if hit is not None:
            generators.append({a: b for a, b in zip(order0, hit) if a != b})
    return len(_orbit(v0, generators)) * _aut_search(rows, child)


def _aut_local(n: int, rows: Rows) -> int:
    if n <= 1:
        return 1
    comps = _local_components(n, rows)
    if len(comps) == 1:
        crows = _complement_rows(n, rows)
        ccomps = _local_components(n, crows)
        if len(ccomps) == 1:
            return _aut_search(rows, _refine(rows, [list(range(n))]))
        rows, comps = crows, ccomps
    classes: Dict[Tuple[int, int], List[int]] = {}
    for comp in comps:
        members = list(iter_bits(comp))
        sub = _sub_rows(rows, members)
        code, _ = _canon(len(members), sub)
        entry = classes.setdefault((len(members), code), [0, _aut_local(len(members), sub)])
        entry[0] += 1
    total = 1
    for count, aut in classes.values():
        total *= aut**count * _factorial(count)
    return total


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def automorphism_count(g: Graph, *, cap: Optional[int] = None) -> int:
    """Exact |Aut(g)| by orbit-stabilizer search over the refinement tree."""
    _check_cap(g, cap, DEFAULT_AUT_CAP, "automorphism_count")
    return _aut_local(g.n, g.rows)


# ---------------------------------------------------------------------------
# Brute-force oracles (tests, naive mu)
# ---------------------------------------------------------------------------


def brute_force_isomorphic(g1: Graph, g2: Graph) -> bool:
    if g1.n != g2.n or g1.edge_count() != g2.edge_count():
        return False
    target = g2.rows
    for perm in itertools.permutations(range(g1.n)):
        if all((target[perm[u]] >> perm[v]) & 1 for u, v in g1.edges()):
            return True
    return False


def brute_force_automorphisms(g: Graph) -> int:
    edges = g.edges()
    rows = g.rows
    count = 0
    for perm in itertools.permutations(range(g.n)):
        if all((rows[perm[u]] >> perm[v]) & 1 for u, v in edges):
            count += 1
    return count


# ---------------------------------------------------------------------------
# Kernel entry points (no Graph allocation)
# ---------------------------------------------------------------------------


def induced_rows(rows: Rows, members: List[int]) -> Rows:
    """Rows of the subgraph induced by ``members`` (ascending), relabelled 0..k-1."""
    return _sub_rows(rows, members)


def canonical_key(n: int, rows: Rows) -> Tuple[int, int]:
    """(n, encoding): hashable stand-in for the certificate of the local graph."""
    return n, _canon(n, rows)[0]


def key_to_form(key: Tuple[int, int]) -> CanonicalForm:
    return _to_bytes(key[0], key[1])
