"""mulab.trees

Rooted trees, AHU codes, and counting of non-isomorphic root-containing
subtrees.

f(T) is the number of pairwise non-isomorphic subtrees of T that contain the
root; f_plus(T) = f(T) + 1 also admits the empty choice.

Counting works on interned type ids: a rooted tree's type is the sorted tuple
of its children's type ids, interned into a table shared by all trees being
compared. The set of subtree types at a node is built from its children's sets
by merging one child at a time, which is exact but grows with f; above a
configurable type cap the certified lower bound is used instead.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Iterable, List, NamedTuple, Optional, Sequence, Set, Tuple

from .defaults import DEFAULT_SUBTREE_TYPE_CAP, DEFAULT_TREE_BRUTE_CAP
from .errors import CapExceeded, GraphFormatError
from .rng import Seed

if TYPE_CHECKING:
    from .models import GWConfig

_LN2 = math.log(2.0)

TypeTable = Dict[Tuple[int, ...], int]


@dataclass(frozen=True)
class RootedTree:
    """Child-list tree rooted at node 0."""

    children: Tuple[Tuple[int, ...], ...]
    truncated: bool = False

    @property
    def size(self) -> int:
        return len(self.children)

    @classmethod
    def single(cls) -> "RootedTree":
        return cls(((),))

    @classmethod
    def from_parents(cls, parents: Sequence[int], *, truncated: bool = False) -> "RootedTree":
        """
        Build from a parent array (-1 marks the root).

        Nodes are relabelled in BFS order from the root so that node 0 is the root.
        """
        n = len(parents)
        if n == 0:
            raise GraphFormatError("a rooted tree needs at least one node")
        roots = [v for v, p in enumerate(parents) if p < 0]
        if len(roots) != 1:
            raise GraphFormatError(f"expected exactly one root, found {len(roots)}")
        kids: List[List[int]] = [[] for _ in range(n)]
        for v, p in enumerate(parents):
            if p >= 0:
                if p >= n:
                    raise GraphFormatError(f"parent {p} of node {v} out of range")
                kids[p].append(v)
        order = [roots[0]]
        for v in order:
            order.extend(kids[v])
        if len(order) != n:
            raise GraphFormatError("parent array contains a cycle")
        new_id = {v: i for i, v in enumerate(order)}
        return cls(tuple(tuple(new_id[c] for c in kids[v]) for v in order), truncated)

    @classmethod
    def path(cls, n: int) -> "RootedTree":
        """Path rooted at an endpoint."""
        return cls(tuple((i + 1,) if i + 1 < n else () for i in range(n)))

    @classmethod
    def star(cls, leaves: int) -> "RootedTree":
        """Star rooted at its centre."""
        return cls((tuple(range(1, leaves + 1)),) + ((),) * leaves)

    def parents(self) -> List[int]:
        out = [-1] * self.size
        for v, kids in enumerate(self.children):
            for c in kids:
                out[c] = v
        return out

    def bfs_order(self) -> List[int]:
        order = [0]
        for v in order:
            order.extend(self.children[v])
        return order

    def add_leaf(self, parent: int) -> "RootedTree":
        kids = [list(c) for c in self.children]
        kids[parent].append(self.size)
        kids.append([])
        return RootedTree(tuple(tuple(c) for c in kids), self.truncated)


# ---------------------------------------------------------------------------
# AHU
# ---------------------------------------------------------------------------


def ahu_code(t: RootedTree) -> str:
    """Balanced-parenthesis code; children codes sorted, concatenated, wrapped."""
    codes: List[str] = [""] * t.size
    for v in reversed(t.bfs_order()):
        codes[v] = "(" + "".join(sorted(codes[c] for c in t.children[v])) + ")"
    return codes[0]


def type_ids(t: RootedTree, table: TypeTable) -> List[int]:
    """Interned type id of every T_v; ids are comparable across trees sharing ``table``."""
    ids = [0] * t.size
    for v in reversed(t.bfs_order()):
        key = tuple(sorted(ids[c] for c in t.children[v]))
        ids[v] = table.setdefault(key, len(table))
    return ids


def parse_ahu(code: str) -> RootedTree:
    parents: List[int] = []
    stack: List[int] = []
    for ch in code.strip():
        if ch == "(":
            parents.append(stack[-1] if stack else -1)
            stack.append(len(parents) - 1)
        elif ch == ")":
            if not stack:
                raise GraphFormatError(f"unbalanced AHU code: {code!r}")
            stack.pop()
        else:
            raise GraphFormatError(f"unexpected character {ch!r} in AHU code")
    if stack or not parents or parents.count(-1) != 1:
        raise GraphFormatError(f"malformed AHU code: {code!r}")
    return RootedTree.from_parents(parents)


# ---------------------------------------------------------------------------
# Arithmetic helpers
# ---------------------------------------------------------------------------


def multichoose(a: int, m: int) -> int:
    """C(a + m - 1, m): multisets of size m from a kinds."""
    if m < 0 or a < 0:
        return 0
    out = 1
    for i in range(1, m + 1):
        out = out * (a - 1 + i) // i
    return out


def ln_big(x: int) -> float:
    """Natural log of a positive big integer from its top 64 bits and bit length."""
    if x <= 0:
        raise ValueError("ln_big needs a positive integer")
    b = x.bit_length()
    if b <= 64:
        return math.log(x)
    return math.log(x >> (b - 64)) + (b - 64) * _LN2


# ---------------------------------------------------------------------------
# Subtree counting
# ---------------------------------------------------------------------------


class SubtreeCount(NamedTuple):
    f: int
    exact: bool = True

    @property
    def f_plus(self) -> int:
        return self.f + 1

    @property
    def ln_f(self) -> float:
        return ln_big(self.f)


def _merge(current: Set[Tuple[int, ...]], options: Iterable[int]) -> Set[Tuple[int, ...]]:
    out = set(current)
    for ms in current:
        for t in options:
            out.add(tuple(sorted(ms + (t,))))
    return out


def _node_lower_bound(child_lbs: Sequence[int], child_types: Sequence[int]) -> int:
    """max(ceil(prod f_plus / j!), max over classes multichoose(f_plus(c), m_c), 1)."""
    j = len(child_lbs)
    if j == 0:
        return 1
    prod = 1
    for f in child_lbs:
        prod *= f + 1
    fact = math.factorial(j)
    best = -(-prod // fact)
    per_class: Dict[int, List[int]] = {}
    for f, ty in zip(child_lbs, child_types):
        per_class.setdefault(ty, []).append(f)
    for fs in per_class.values():
        best = max(best, multichoose(max(fs) + 1, len(fs)))
    return max(best, 1)


def _subtree_counts(
    t: RootedTree,
    type_cap: Optional[int],
    table: Optional[TypeTable] = None,
) -> Tuple[List[int], List[bool]]:
    """Per-node f (exact where possible, certified lower bound elsewhere) and exactness flags."""
    cap = DEFAULT_SUBTREE_TYPE_CAP if type_cap is None else type_cap
    table = {} if table is None else table
    shape_ids = type_ids(t, {})
    n = t.size
    sets: List[Optional[Set[int]]] = [None] * n
    counts = [0] * n
    exact = [False] * n
    for v in reversed(t.bfs_order()):
        kids = t.children[v]
        if all(sets[c] is not None for c in kids):
            current: Set[Tuple[int, ...]] = {()}
            ok = True
            for c in kids:
                opts = sets[c]
                assert opts is not None
                if len(current) * (len(opts) + 1) > cap:
                    ok = False
                    break
                current = _merge(current, opts)
            if ok:
                sets[v] = {table.setdefault(ms, len(table)) for ms in current}
                counts[v] = len(current)
                exact[v] = True
                for c in kids:
                    sets[c] = None
                continue
        counts[v] = _node_lower_bound([counts[c] for c in kids], [shape_ids[c] for c in kids])
    return counts, exact


def count_subtrees_exact(t: RootedTree, *, type_cap: Optional[int] = None) -> SubtreeCount:
    """Exact f(T); raises CapExceeded when the type enumeration outgrows ``type_cap``."""
    counts, exact = _subtree_counts(t, type_cap)
    if not exact[0]:
        cap = DEFAULT_SUBTREE_TYPE_CAP if type_cap is None else type_cap
        raise CapExceeded("count_subtrees_exact type enumeration", counts[0], cap)
    return SubtreeCount(counts[0], True)


def subtree_count_lower(t: RootedTree, *, type_cap: Optional[int] = None) -> SubtreeCount:
    """Exact f(T) when enumerable, else a certified lower bound (``exact=False``)."""
    counts, exact = _subtree_counts(t, type_cap)
    return SubtreeCount(counts[0], exact[0])


def subtree_counts_per_node(t: RootedTree, *, type_cap: Optional[int] = None) -> List[int]:
    counts, exact = _subtree_counts(t, type_cap)
    if not all(exact):
        cap = DEFAULT_SUBTREE_TYPE_CAP if type_cap is None else type_cap
        raise CapExceeded("subtree_counts_per_node type enumeration", max(counts), cap)
    return counts


def recursive_f_plus_bound(child_f: Sequence[int]) -> int:
    """Right-hand side of f_plus(T) >= prod f_plus(T_c) / j! + 1, as f_plus, rounded up."""
    prod = 1
    for f in child_f:
        prod *= f + 1
    return -(-prod // math.factorial(len(child_f))) + 1


def class_product_bound(t: RootedTree, counts: Sequence[int], v: int) -> int:
    """prod over isomorphism classes of children of multichoose(f_plus(c), m_c); an upper bound on f(T_v)."""
    shape = type_ids(t, {})
    classes = Counter(shape[c] for c in t.children[v])
    rep = {shape[c]: c for c in t.children[v]}
    out = 1
    for ty, m in classes.items():
        out *= multichoose(counts[rep[ty]] + 1, m)
    return out


def _subset_code(t: RootedTree, keep: int) -> str:
    codes: Dict[int, str] = {}
    for v in reversed(t.bfs_order()):
        if (keep >> v) & 1:
            codes[v] = "(" + "".join(sorted(codes[c] for c in t.children[v] if (keep >> c) & 1)) + ")"
    return codes[0]


def count_subtrees_bruteforce(t: RootedTree, *, cap: Optional[int] = None) -> SubtreeCount:
    """Enumerate every connected root-containing node set and dedupe by AHU code."""
    limit = DEFAULT_TREE_BRUTE_CAP if cap is None else cap
    if t.size > limit:
        raise CapExceeded("count_subtrees_bruteforce", t.size, limit)
    sets: List[List[int]] = [[] for _ in range(t.size)]
    for v in reversed(t.bfs_order()):
        acc = [1 << v]
        for c in t.children[v]:
            acc = acc + [a | s for a in acc for s in sets[c]]
        sets[v] = acc
    return SubtreeCount(len({_subset_code(t, s) for s in sets[0]}), True)


# ---------------------------------------------------------------------------
# Products over forests
# ---------------------------------------------------------------------------


def product_f_lower_bound(trees: Iterable[RootedTree], *, type_cap: Optional[int] = None) -> int:
    """prod f(T_i) over the forest; exact when every tree is enumerable, a lower bound otherwise."""
    out = 1
    table: TypeTable = {}
    for t in trees:
        counts, _ = _subtree_counts(t, type_cap, table)
        out *= counts[0]
    return out


def log_product_f(trees: Iterable[RootedTree], *, type_cap: Optional[int] = None) -> float:
    """sum ln f(T_i) without forming the big product."""
    table: TypeTable = {}
    total = []
    for t in trees:
        counts, _ = _subtree_counts(t, type_cap, table)
        total.append(ln_big(counts[0]))
    return math.fsum(total)


# ---------------------------------------------------------------------------
# Unrooted trees (centre rooting)
# ---------------------------------------------------------------------------


def tree_center(adjacency: Dict[int, List[int]]) -> List[int]:
    """Centre (1 or 2 vertices) of a tree given as an adjacency map, by leaf peeling."""
    if len(adjacency) <= 2:
        return sorted(adjacency)
    degree = {v: len(nb) for v, nb in adjacency.items()}
    layer = [v for v, d in degree.items() if d <= 1]
    remaining = len(adjacency)
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for u in adjacency[v]:
                degree[u] -= 1
                if degree[u] == 1:
                    nxt.append(u)
        layer = nxt
    return sorted(layer)


def rooted_at(adjacency: Dict[int, List[int]], root: int) -> Tuple[RootedTree, List[int]]:
    """Root a tree at ``root``; also returns the original label of every tree node."""
    order = [root]
    parent = {root: -1}
    for v in order:
        for u in adjacency[v]:
            if u not in parent:
                parent[u] = v
                order.append(u)
    index = {v: i for i, v in enumerate(order)}
    return RootedTree.from_parents([index[parent[v]] if parent[v] >= 0 else -1 for v in order]), order


def unrooted_code(adjacency: Dict[int, List[int]]) -> str:
    """AHU code at the centre; for a bicentral tree, the smaller of the two rootings."""
    return min(ahu_code(rooted_at(adjacency, c)[0]) for c in tree_center(adjacency))


# ---------------------------------------------------------------------------
# Galton-Watson estimator
# ---------------------------------------------------------------------------


class GWEstimate(NamedTuple):
    """Sample statistics of ln f over non-truncated GW trees."""

    mean: float
    stderr: float
    used: int
    truncated_count: int
    bounded_count: int
    values: Tuple[float, ...] = ()

    def to_dict(self) -> Dict[str, float]:
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "used": self.used,
            "truncated_count": self.truncated_count,
            "bounded_count": self.bounded_count,
        }


class _GWTask(NamedTuple):
    lambda_: float
    max_nodes: int
    seed_value: int
    seed_stream: int
    type_cap: Optional[int]


def _gw_replica(task: _GWTask) -> Tuple[Optional[float], bool, bool]:
    """(ln f or None if truncated, truncated, exact)."""
    from .models import GWConfig, sample_gw_tree

    tree = sample_gw_tree(GWConfig(task.lambda_, task.max_nodes), Seed(task.seed_value, task.seed_stream))
    if tree.truncated:
        return None, True, False
    count = subtree_count_lower(tree, type_cap=task.type_cap)
    return count.ln_f, False, count.exact


def summarize(values: Sequence[float]) -> Tuple[float, float]:
    """(mean, standard error of the mean); stderr is 0 for fewer than two values."""
    k = len(values)
    if k == 0:
        return float("nan"), float("nan")
    mean = math.fsum(values) / k
    if k < 2:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in values) / (k - 1)
    return mean, math.sqrt(var / k)


def estimate_log_f(
    cfg: "GWConfig",
    replicas: int,
    seed: Seed,
    *,
    workers: Optional[int] = None,
    type_cap: Optional[int] = None,
    keep_values: bool = False,
) -> GWEstimate:
    """
    Monte Carlo estimate of E ln f(T) for T ~ GW(Pois(cfg.lambda_)).

    Truncated trees are excluded and counted. Trees whose type enumeration
    exceeds the cap contribute their certified lower bound and are counted in
    ``bounded_count``, so the mean is never biased upwards.
    """
    from .parallel import indexed_map

    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    tasks = []
    for i in range(replicas):
        s = seed.spawn(i)
        tasks.append(_GWTask(cfg.lambda_, cfg.max_nodes, s.value, s.stream, type_cap))
    results = indexed_map(_gw_replica, tasks, workers=workers, chunksize=256)
    values = [v for v, trunc, _ in results if not trunc and v is not None]
    truncated = sum(1 for _, trunc, _ in results if trunc)
    bounded = sum(1 for _, trunc, exact in results if not trunc and not exact)
    mean, stderr = summarize(values)
    return GWEstimate(mean, stderr, len(values), truncated, bounded, tuple(values) if keep_values else ())
