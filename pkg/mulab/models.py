"""mulab.models

Seeded samplers: G(n,p), uniform d-regular graphs (pairing model), uniform
vertex subsets and Poisson Galton-Watson trees.

Each sampler is a pure function of (parameters, Seed).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .defaults import (
    DEFAULT_GW_MAX_NODES,
    DEFAULT_POISSON_INVERSION_MAX,
    DEFAULT_REGULAR_RETRY_LIMIT,
    DEFAULT_SPARSE_P,
)
from .errors import DomainError, RetryLimit
from .graph import Graph, VertexSet, complete_graph, empty_graph, from_matrix
from .rng import Seed
from .trees import RootedTree

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Row assembly
# ---------------------------------------------------------------------------


def _rows_from_edges(n: int, us: np.ndarray, vs: np.ndarray) -> Tuple[int, ...]:
    rows = [0] * n
    for u, v in zip(us.tolist(), vs.tolist()):
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return tuple(rows)


def _mask_from_bools(bits: np.ndarray) -> int:
    if bits.size == 0:
        return 0
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


# ---------------------------------------------------------------------------
# G(n, p)
# ---------------------------------------------------------------------------


def _row_starts(n: int) -> np.ndarray:
    i = np.arange(n, dtype=np.int64)
    return i * (2 * n - i - 1) // 2


def _sparse_pairs(n: int, p: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Geometric skipping over the row-major pair index (i < j)."""
    total = n * (n - 1) // 2
    batch = max(1024, int(total * p * 1.1) + 64)
    picks: List[np.ndarray] = []
    pos = -1
    while True:
        gaps = rng.geometric(p, size=batch).astype(np.int64)
        idx = pos + np.cumsum(gaps)
        keep = idx[idx < total]
        picks.append(keep)
        if keep.size < idx.size:
            break
        pos = int(idx[-1])
    k = np.concatenate(picks) if picks else np.zeros(0, dtype=np.int64)
    starts = _row_starts(n)
    i = np.searchsorted(starts, k, side="right") - 1
    j = k - starts[i] + i + 1
    return i, j


def sample_gnp(n: int, p: float, seed: Seed) -> Graph:
    """
    Binomial random graph G(n, p).

    p < 0.1 uses geometric skipping over pair indices; otherwise one uniform per
    pair, drawn row by row.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if n < 0:
        raise DomainError("n must be non-negative")
    if p == 0.0 or n < 2:
        return empty_graph(n)
    if p == 1.0:
        return complete_graph(n)
    rng = seed.generator()
    if p < DEFAULT_SPARSE_P:
        i, j = _sparse_pairs(n, p, rng)
        return Graph(n, _rows_from_edges(n, i, j))
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n - 1):
        adj[i, i + 1 :] = rng.random(n - i - 1) < p
    adj |= adj.T
    return from_matrix(adj)


def sample_max_degree_gnp(
    n: int,
    p: float,
    max_degree: int,
    seed: Seed,
    *,
    retry_limit: Optional[int] = None,
) -> Graph:
    """G(n, p) conditioned on maximum degree <= max_degree, by rejection."""
    limit = DEFAULT_REGULAR_RETRY_LIMIT if retry_limit is None else retry_limit
    for attempt in range(limit):
        g = sample_gnp(n, p, seed.substream("max-degree", attempt))
        if max(g.degrees(), default=0) <= max_degree:
            if attempt:
                logger.debug("max-degree rejection: accepted after %d rejections", attempt)
            return g
    raise RetryLimit(f"G({n},{p}) with max degree <= {max_degree}", limit)


# ---------------------------------------------------------------------------
# Random regular graphs
# ---------------------------------------------------------------------------


def sample_regular(n: int, d: int, seed: Seed, *, retry_limit: Optional[int] = None) -> Graph:
    """
    Uniform simple d-regular graph via the pairing model.

    The whole matching is redrawn whenever it produces a loop or a repeated pair.
    """
    if d < 1 or d >= n or (n * d) % 2:
        raise DomainError(f"no d-regular pairing for n={n}, d={d} (need 1 <= d < n and n*d even)")
    limit = DEFAULT_REGULAR_RETRY_LIMIT if retry_limit is None else retry_limit
    rng = seed.generator()
    points = np.repeat(np.arange(n, dtype=np.int64), d)
    for attempt in range(limit):
        pairs = rng.permutation(points).reshape(-1, 2)
        a = pairs.min(axis=1)
        b = pairs.max(axis=1)
        if np.any(a == b):
            continue
        keys = a * n + b
        if np.unique(keys).size != keys.size:
            continue
        if attempt:
            logger.debug("pairing model: accepted after %d rejections", attempt)
        return Graph(n, _rows_from_edges(n, a, b))
    raise RetryLimit(f"pairing model n={n} d={d}", limit)


# ---------------------------------------------------------------------------
# Subsets
# ---------------------------------------------------------------------------


def sample_subset(n: int, seed: Seed) -> VertexSet:
    """Each vertex independently with probability 1/2."""
    if n <= 0:
        return 0
    rng = seed.generator()
    return _mask_from_bools(rng.random(n) < 0.5)


def sample_subset_in_window(
    n: int,
    lo: float,
    hi: float,
    seed: Seed,
    *,
    retry_limit: Optional[int] = None,
) -> VertexSet:
    """Uniform subset conditioned on lo <= |U| <= hi (rejection)."""
    limit = DEFAULT_REGULAR_RETRY_LIMIT if retry_limit is None else retry_limit
    rng = seed.generator()
    for _ in range(limit):
        bits = rng.random(n) < 0.5
        size = int(bits.sum())
        if lo <= size <= hi:
            return _mask_from_bools(bits)
    raise RetryLimit(f"subset size window [{lo}, {hi}] for n={n}", limit)


# ---------------------------------------------------------------------------
# Galton-Watson trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GWConfig:
    """Poisson(lambda_) offspring law with a node-count truncation guard."""

    lambda_: float
    max_nodes: int = DEFAULT_GW_MAX_NODES

    def __post_init__(self) -> None:
        if not self.lambda_ > 0:
            raise DomainError(f"lambda must be positive, got {self.lambda_}")
        if self.max_nodes < 1:
            raise DomainError("max_nodes must be >= 1")


def _poisson_cdf_table(lam: float) -> np.ndarray:
    pk = math.exp(-lam)
    cdf = [pk]
    k = 0
    while 1.0 - cdf[-1] > 1e-15 and k < 1000:
        k += 1
        pk *= lam / k
        cdf.append(cdf[-1] + pk)
    return np.asarray(cdf)


def _poisson_inversion(u: np.ndarray, lam: float, table: np.ndarray) -> np.ndarray:
    """Inversion by sequential search, vectorised as a search over the cdf table."""
    counts = np.searchsorted(table, u, side="left")
    for idx in np.nonzero(counts >= table.size)[0]:
        k = table.size - 1
        pk = math.exp(-lam) * lam**k / math.factorial(k)
        cdf = float(table[-1])
        while u[idx] > cdf and pk > 0.0:
            k += 1
            pk *= lam / k
            cdf += pk
        counts[idx] = k
    return counts


def sample_gw_tree(cfg: GWConfig, seed: Seed) -> RootedTree:
    """
    Breadth-first Poisson Galton-Watson tree; node ids follow BFS order.

    Generation stops once ``max_nodes`` would be exceeded; the returned tree is
    then flagged ``truncated``.
    """
    rng = seed.generator()
    lam = cfg.lambda_
    table = _poisson_cdf_table(lam) if lam < DEFAULT_POISSON_INVERSION_MAX else None
    parents: List[np.ndarray] = [np.array([-1], dtype=np.int64)]
    size = 1
    generation = np.array([0], dtype=np.int64)
    truncated = False
    while generation.size:
        if table is not None:
            counts = _poisson_inversion(rng.random(generation.size), lam, table)
        else:
            counts = rng.poisson(lam, size=generation.size)
        born = int(counts.sum())
        if born == 0:
            break
        if size + born > cfg.max_nodes:
            room = cfg.max_nodes - size
            truncated = True
            if room <= 0:
                break
            kids = np.repeat(generation, counts)[:room]
            parents.append(kids)
            size += room
            break
        kids = np.repeat(generation, counts)
        parents.append(kids)
        generation = np.arange(size, size + born, dtype=np.int64)
        size += born
    parent = np.concatenate(parents)
    return RootedTree.from_parents(parent.tolist(), truncated=truncated)
