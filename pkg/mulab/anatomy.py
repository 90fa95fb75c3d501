"""mulab.anatomy

Structural statistics of (random) graphs:

- 2-core of the union of complex components, pendant trees, type tuples
- the conjugate parameter lambda' and the contiguous core-plus-GW-trees model
- xi statistics over vertex pairs (common-agreement counts)
- heuristic long induced paths and comb extraction
- second-largest absolute adjacency eigenvalue of regular graphs
- component census helpers
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import formulas
from .defaults import DEFAULT_EIGEN_ITERATIONS, DEFAULT_EIGEN_TOL, DEFAULT_GW_MAX_NODES, DEFAULT_LAMBDA_TOL
from .errors import DegreeTooLow, DomainError, NotRegular, PathNotInduced
from .graph import (
    Graph,
    VertexSet,
    adjacency_lists,
    adjacency_matrix,
    components,
    from_edges,
    induced_subgraph,
    is_regular,
    iter_bits,
    mask_of,
)
from .rng import Seed
from .trees import RootedTree, ahu_code, rooted_at, unrooted_code

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Core decomposition
# ---------------------------------------------------------------------------


class CoreDecomposition(NamedTuple):
    """
    2-core of the union of complex components, with pendant trees.

    - core_vertices: mask of core vertices
    - pendant: core vertex -> tree sprouting from it (root = the core vertex)
    - pendant_labels: core vertex -> original labels of the pendant tree nodes, in tree order
    - component_labels: per-vertex component id (components ordered by least vertex)
    - complex_flags: per-component "edges >= vertices + 1"
    """

    core_vertices: VertexSet
    pendant: Dict[int, RootedTree]
    pendant_labels: Dict[int, List[int]]
    component_labels: List[int]
    complex_flags: List[bool]

    @property
    def core_size(self) -> int:
        return self.core_vertices.bit_count()

    def core_list(self) -> List[int]:
        return list(iter_bits(self.core_vertices))


class TypeTuple(NamedTuple):
    """Pendant-tree AHU codes per core vertex, ascending vertex order."""

    vertices: Tuple[int, ...]
    codes: Tuple[str, ...]


def _reach(g: Graph, start: int, allowed: VertexSet) -> VertexSet:
    """Vertices reachable from ``start`` through ``allowed``; includes ``start``."""
    region = 1 << start
    frontier = g.rows[start] & allowed
    while frontier:
        region |= frontier
        nxt = 0
        for v in iter_bits(frontier):
            nxt |= g.rows[v]
        frontier = nxt & allowed & ~region
    return region


def core_decompose(g: Graph) -> CoreDecomposition:
    comps = components(g)
    labels = [0] * g.n
    flags: List[bool] = []
    union = 0
    for cid, comp in enumerate(comps):
        for v in iter_bits(comp):
            labels[v] = cid
        is_complex = g.edges_within(comp) >= comp.bit_count() + 1
        flags.append(is_complex)
        if is_complex:
            union |= comp

    alive = union
    deg = {v: (g.rows[v] & alive).bit_count() for v in iter_bits(alive)}
    stack = [v for v, d in deg.items() if d <= 1]
    while stack:
        v = stack.pop()
        if not (alive >> v) & 1:
            continue
        alive &= ~(1 << v)
        for u in iter_bits(g.rows[v] & alive):
            deg[u] -= 1
            if deg[u] <= 1:
                stack.append(u)
    core = alive

    peeled = union & ~core
    pendant: Dict[int, RootedTree] = {}
    pendant_labels: Dict[int, List[int]] = {}
    for v in iter_bits(core):
        if not g.rows[v] & peeled:
            pendant[v] = RootedTree.single()
            pendant_labels[v] = [v]
            continue
        region = _reach(g, v, peeled)
        tree, order = rooted_at(adjacency_lists(g, region), v)
        pendant[v] = tree
        pendant_labels[v] = order
    return CoreDecomposition(core, pendant, pendant_labels, labels, flags)


def core_graph(g: Graph, dec: CoreDecomposition) -> Graph:
    return induced_subgraph(g, dec.core_vertices)


def type_tuple(g: Graph, dec: CoreDecomposition) -> TypeTuple:
    vertices = tuple(dec.core_list())
    return TypeTuple(vertices, tuple(ahu_code(dec.pendant[v]) for v in vertices))


def pendant_sizes(dec: CoreDecomposition) -> List[int]:
    return [dec.pendant[v].size for v in dec.core_list()]


# ---------------------------------------------------------------------------
# Conjugate parameter and the contiguous model
# ---------------------------------------------------------------------------


def conjugate_lambda(lam: float, *, tol: float = DEFAULT_LAMBDA_TOL) -> float:
    """Unique x in (0, 1) with x e^-x = lam e^-lam, by bisection."""
    if not (isinstance(lam, (int, float)) and math.isfinite(lam)) or lam <= 1.0:
        raise DomainError(f"conjugate parameter needs lambda > 1, got {lam}")
    target = lam * math.exp(-lam)
    lo, hi = 0.0, 1.0
    mid = 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        h = mid * math.exp(-mid) - target
        if h == 0.0:
            break
        if h < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-17:
            break
    residual = abs(mid * math.exp(-mid) - target)
    assert residual <= tol, f"bisection residual {residual} above {tol}"
    return mid


class ContiguousModel(NamedTuple):
    graph: Graph
    core_size: int
    added: int
    truncated_trees: int
    tree_sizes: Tuple[int, ...]


def build_contiguous_model(
    core: Graph,
    lambda_prime: float,
    seed: Seed,
    *,
    max_nodes: int = DEFAULT_GW_MAX_NODES,
) -> ContiguousModel:
    """Graft an independent Pois(lambda')-GW tree onto every core vertex; new nodes get fresh labels."""
    from .models import GWConfig, sample_gw_tree

    if not 0.0 < lambda_prime < 1.0:
        raise DomainError(f"lambda' must lie in (0, 1), got {lambda_prime}")
    cfg = GWConfig(lambda_prime, max_nodes)
    edges = list(core.edges())
    next_label = core.n
    sizes: List[int] = []
    truncated = 0
    for v in range(core.n):
        tree = sample_gw_tree(cfg, seed.substream("pendant", v))
        truncated += int(tree.truncated)
        sizes.append(tree.size)
        label = [v] + list(range(next_label, next_label + tree.size - 1))
        next_label += tree.size - 1
        for parent, kids in enumerate(tree.children):
            for c in kids:
                edges.append((label[parent], label[c]))
    if truncated:
        logger.warning("contiguous model: %d pendant trees truncated", truncated)
    return ContiguousModel(from_edges(next_label, edges), core.n, next_label - core.n, truncated, tuple(sizes))


# ---------------------------------------------------------------------------
# xi statistics
# ---------------------------------------------------------------------------


class XiStats(NamedTuple):
    alpha: float
    beta: float
    xi_max: int
    argmax_pair: Tuple[int, int]
    histogram: Tuple[int, ...]
    max_pairs: Tuple[Tuple[int, int], ...] = ()
    degrees: Tuple[int, ...] = ()

    @property
    def normalized(self) -> float:
        """(xi_max - alpha) / beta; nan when beta = 0."""
        return (self.xi_max - self.alpha) / self.beta if self.beta > 0 else float("nan")

    @property
    def pair_count(self) -> int:
        return int(sum(self.histogram))

    def mean(self) -> float:
        total = sum(k * c for k, c in enumerate(self.histogram))
        return total / self.pair_count if self.pair_count else float("nan")

    def window_fraction(self, lo: float, hi: float) -> float:
        """Fraction of maximizing pairs whose two degrees both lie in [lo, hi]."""
        if not self.max_pairs:
            return float("nan")
        inside = sum(1 for x, y in self.max_pairs if lo <= self.degrees[x] <= hi and lo <= self.degrees[y] <= hi)
        return inside / len(self.max_pairs)


def _xi_block(args: Tuple[np.ndarray, np.ndarray, int, int, int]) -> Tuple[np.ndarray, int, Tuple[int, int], List[Tuple[int, int]]]:
    a, deg, n, lo, hi = args
    block = a[lo:hi]
    common = np.rint(block @ a.T).astype(np.int64)
    xi = 2 * common + (n - 2) - deg[lo:hi, None] - deg[None, :] + 2 * block.astype(np.int64)
    cols = np.arange(n)
    rows = np.arange(lo, hi)
    upper = cols[None, :] > rows[:, None]
    vals = xi[upper]
    hist = np.bincount(vals, minlength=max(n - 1, 1))
    if vals.size == 0:
        return hist, -1, (-1, -1), []
    best = int(vals.max())
    hits = np.argwhere((xi == best) & upper)
    pairs = [(int(lo + i), int(j)) for i, j in hits[:10_000]]
    return hist, best, pairs[0], pairs


def xi_stats(
    g: Graph,
    p: float,
    *,
    block_rows: int = 256,
    workers: Optional[int] = None,
) -> XiStats:
    """
    xi_{x,x'} = #{v not in {x,x'} adjacent to both or to neither}, for all pairs.

    Computed as 2*common + (n-2) - deg x - deg x' + 2*[x~x'], with common-neighbour
    counts from a blocked matrix product. Blocks may run on threads; the merge
    (histogram sum, first lexicographic argmax) is order independent.
    """
    n = g.n
    if n < 2:
        raise DomainError("xi statistics need n >= 2")
    a = adjacency_matrix(g).astype(np.float32)
    deg = a.sum(axis=1).astype(np.int64)
    tasks = [(a, deg, n, lo, min(n, lo + block_rows)) for lo in range(0, n - 1, block_rows)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_xi_block, tasks))
    else:
        parts = [_xi_block(t) for t in tasks]
    hist = np.zeros(max(n - 1, 1), dtype=np.int64)
    best = -1
    arg = (-1, -1)
    max_pairs: List[Tuple[int, int]] = []
    for h, b, first, pairs in parts:
        hist[: h.size] += h
        if b > best:
            best, arg, max_pairs = b, first, list(pairs)
        elif b == best:
            max_pairs.extend(pairs)
    return XiStats(
        alpha=formulas.alpha_n(n, p),
        beta=formulas.beta_n(n, p),
        xi_max=best,
        argmax_pair=arg,
        histogram=tuple(int(x) for x in hist),
        max_pairs=tuple(max_pairs[:10_000]),
        degrees=tuple(int(d) for d in deg),
    )


# ---------------------------------------------------------------------------
# Induced paths and combs
# ---------------------------------------------------------------------------


def is_induced_path(g: Graph, path: Sequence[int]) -> bool:
    if len(set(path)) != len(path):
        return False
    if any(not g.has_edge(path[i], path[i + 1]) for i in range(len(path) - 1)):
        return False
    return g.edges_within(mask_of(path)) == max(len(path) - 1, 0)


def _extension_candidates(g: Graph, end: int, pmask: int) -> List[int]:
    bit = 1 << end
    return [w for w in iter_bits(g.rows[end] & ~pmask) if g.rows[w] & pmask == bit]


def _dfs_path(g: Graph, start: int, rng: np.random.Generator, budget: int) -> List[int]:
    path = [start]
    pmask = 1 << start
    best = [start]
    stack = [list(rng.permutation(_extension_candidates(g, start, pmask)))]
    steps = 0
    while stack and steps < budget:
        steps += 1
        cands = stack[-1]
        if not cands:
            stack.pop()
            pmask &= ~(1 << path.pop())
            continue
        w = int(cands.pop())
        if g.rows[w] & pmask != 1 << path[-1]:
            continue
        path.append(w)
        pmask |= 1 << w
        if len(path) > len(best):
            best = list(path)
        stack.append(list(rng.permutation(_extension_candidates(g, w, pmask))))
    return best


def _extend_greedy(g: Graph, path: List[int], rng: np.random.Generator) -> List[int]:
    path = list(path)
    pmask = mask_of(path)
    while True:
        cands = _extension_candidates(g, path[-1], pmask)
        if not cands:
            return path
        w = int(cands[int(rng.integers(len(cands)))])
        path.append(w)
        pmask |= 1 << w


def find_induced_path(g: Graph, tries: int, seed: Seed, *, budget: Optional[int] = None) -> List[int]:
    """
    Best-effort longest induced path.

    Each try runs a randomized backtracking DFS (bounded by ``budget`` steps) that
    only extends to vertices whose sole path neighbour is the current end, then
    greedily extends the other end. The returned path is re-checked.
    """
    if g.n == 0:
        return []
    rng = seed.generator()
    steps = budget if budget is not None else 20 * g.n
    best: List[int] = [0]
    for _ in range(max(1, tries)):
        start = int(rng.integers(g.n))
        path = _dfs_path(g, start, rng, steps)
        path = _extend_greedy(g, list(reversed(path)), rng)
        if len(path) > len(best):
            best = path
    assert is_induced_path(g, best), "heuristic returned a non-induced path"
    return best


class CombExtraction(NamedTuple):
    comb: Graph
    u_star_size: int
    u_star: Tuple[int, ...]
    vertices: Tuple[int, ...]


def extract_comb(g: Graph, path: Sequence[int]) -> CombExtraction:
    """
    Pick a tooth u_i (smallest off-path neighbour) for every path vertex v_i and keep
    U* = teeth that are distinct, have exactly one neighbour in V(P) + U, and do
    not belong to the first two or last two path vertices.
    """
    path = list(path)
    if not is_induced_path(g, path):
        raise PathNotInduced(f"vertex sequence of length {len(path)} is not an induced path")
    pmask = mask_of(path)
    ell = len(path)
    teeth: List[Optional[int]] = []
    for i, v in enumerate(path):
        off = g.rows[v] & ~pmask
        if not off:
            if 0 < i < ell - 1:
                raise DegreeTooLow(f"path vertex {v} has degree {g.degree(v)} and no off-path neighbour")
            teeth.append(None)
            continue
        teeth.append((off & -off).bit_length() - 1)
    u_mask = mask_of(u for u in teeth if u is not None)
    seen: Dict[int, int] = {}
    for u in teeth:
        if u is not None:
            seen[u] = seen.get(u, 0) + 1
    excluded = set(range(min(2, ell))) | set(range(max(0, ell - 2), ell))
    u_star = []
    for i, u in enumerate(teeth):
        if u is None or i in excluded or seen[u] != 1:
            continue
        if (g.rows[u] & (pmask | u_mask)).bit_count() != 1:
            continue
        u_star.append(u)
    keep = pmask | mask_of(u_star)
    return CombExtraction(induced_subgraph(g, keep), len(u_star), tuple(u_star), tuple(iter_bits(keep)))


# ---------------------------------------------------------------------------
# Spectrum
# ---------------------------------------------------------------------------


class EigenEstimate(NamedTuple):
    value: float
    iterations: int
    converged: bool


def second_eigenvalue(
    g: Graph,
    iterations: int = DEFAULT_EIGEN_ITERATIONS,
    *,
    tol: float = DEFAULT_EIGEN_TOL,
    seed: Optional[Seed] = None,
) -> EigenEstimate:
    """
    Largest |eigenvalue| of A on the complement of the all-ones vector.

    Power iteration with mean subtraction after every product; stops when the
    norm-ratio estimate moves by less than ``tol`` (relative) or after
    ``iterations`` steps. Error decays like (|lambda_3| / |lambda_2|)^iterations.
    """
    if g.n < 2 or not is_regular(g):
        raise NotRegular("second_eigenvalue needs a regular graph with n >= 2")
    a = adjacency_matrix(g).astype(np.float64)
    rng = (seed or Seed(0)).generator()
    x = rng.standard_normal(g.n)
    x -= x.mean()
    x /= np.linalg.norm(x)
    est = 0.0
    for it in range(1, iterations + 1):
        y = a @ x
        y -= y.mean()
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            return EigenEstimate(0.0, it, True)
        prev, est = est, norm
        x = y / norm
        if it > 1 and abs(est - prev) <= tol * max(1.0, est):
            return EigenEstimate(est, it, True)
    return EigenEstimate(est, iterations, False)


# ---------------------------------------------------------------------------
# Census helpers
# ---------------------------------------------------------------------------


class ComponentCensus(NamedTuple):
    sizes: Dict[int, int]
    tree_types: Dict[int, Dict[str, int]]
    cyclic: List[VertexSet]
    trees: List[VertexSet]


def component_census(g: Graph, *, type_limit: Optional[int] = None) -> ComponentCensus:
    """
    Component sizes, and for acyclic components the count of each unrooted tree type
    (AHU code at the centre). Trees above ``type_limit`` vertices are counted but not typed.
    """
    sizes: Dict[int, int] = {}
    tree_types: Dict[int, Dict[str, int]] = {}
    cyclic: List[VertexSet] = []
    trees: List[VertexSet] = []
    for comp in components(g):
        k = comp.bit_count()
        sizes[k] = sizes.get(k, 0) + 1
        if g.edges_within(comp) == k - 1:
            trees.append(comp)
            if type_limit is None or k <= type_limit:
                code = unrooted_code(adjacency_lists(g, comp))
                bucket = tree_types.setdefault(k, {})
                bucket[code] = bucket.get(code, 0) + 1
        else:
            cyclic.append(comp)
    return ComponentCensus(sizes, tree_types, cyclic, trees)


def isolated_vertices(g: Graph, within: VertexSet = -1) -> int:
    """Vertices of ``within`` with no neighbour inside ``within`` (all of V by default)."""
    s = (1 << g.n) - 1 if within < 0 else within
    return sum(1 for v in iter_bits(s) if not g.rows[v] & s)


def outside_isolated(g: Graph, u: VertexSet) -> int:
    """Vertices outside u with no neighbour in u."""
    outside = ((1 << g.n) - 1) & ~u
    return sum(1 for v in iter_bits(outside) if not g.rows[v] & u)


def min_degree_inside(g: Graph, u: VertexSet) -> int:
    return min(((g.rows[v] & u).bit_count() for v in iter_bits(u)), default=0)
