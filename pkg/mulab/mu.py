"""mulab.mu

mu(G): the number of pairwise non-isomorphic induced subgraphs of G, counting
the empty subgraph (so mu(K_n) = n + 1).

- ``mu_exact``: all 2^n subsets, canonicalized and deduplicated
- ``mu_oracle_naive``: brute-force permutations, no canonical forms
- ``mu_sample_lower``: Monte Carlo over uniform subsets
- ``mu_lower_certificates``: constructive lower bounds (component types, combs, type tuples)
- ``mu_upper_subcritical`` / ``mu_upper_structural``: upper bounds
- ``edge_concentration`` and ``mckay_log_prob``: supporting checks

Bounds are carried as (method tag, log2 value) pairs on a MuReport. The
common-agreement pairs of two vertices give no lower bound: that family
counts sets sharing a type, not distinct types.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Set, Tuple

import numpy as np

from . import formulas
from .anatomy import (
    CombExtraction,
    component_census,
    core_decompose,
    core_graph,
    extract_comb,
    find_induced_path,
    isolated_vertices,
    xi_stats,
)
from .canon import (
    brute_force_isomorphic,
    canonical_form,
    canonical_key,
    automorphism_count,
    induced_rows,
)
from .defaults import (
    DEFAULT_AUT_CAP,
    DEFAULT_CANON_CAP,
    DEFAULT_EDGE_TRIALS,
    DEFAULT_EXACT_CAP,
    DEFAULT_EXHAUSTIVE_SUBSET_MAX,
    DEFAULT_NAIVE_CAP,
    DEFAULT_PATH_TRIES,
    KERNEL_MAX_N,
)
from .errors import CapExceeded, DomainError
from .graph import Graph, VertexSet, components, induced_subgraph, iter_bits, mask_of
from .models import sample_subset
from .parallel import indexed_map, resolve_workers
from .rng import Seed
from .trees import subtree_count_lower

_BOUND_SLACK = 1e-9

Bound = Tuple[str, float]


@dataclass
class MuReport:
    """
    Exact value and/or log2 bounds for mu(G).

    Construction asserts max(lower) <= log2(exact) <= min(upper) whenever the
    pieces are present. ``elapsed`` is informational and never serialized into
    experiment outputs.
    """

    n: int
    exact: Optional[int] = None
    lower_bounds: List[Bound] = field(default_factory=list)
    upper_bounds: List[Bound] = field(default_factory=list)
    subsets_enumerated: int = 0
    elapsed: float = 0.0
    estimates: Dict[str, float] = field(default_factory=dict)
    notes: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.check()

    def check(self) -> None:
        lo = self.best_lower()
        hi = self.best_upper()
        if lo is not None and hi is not None:
            assert lo[1] <= hi[1] + _BOUND_SLACK, f"lower bound {lo} above upper bound {hi}"
        if self.exact is not None:
            ex = math.log2(self.exact)
            if lo is not None:
                assert lo[1] <= ex + _BOUND_SLACK, f"lower bound {lo} above log2(exact)={ex}"
            if hi is not None:
                assert ex <= hi[1] + _BOUND_SLACK, f"upper bound {hi} below log2(exact)={ex}"

    def best_lower(self) -> Optional[Bound]:
        return max(self.lower_bounds, key=lambda b: b[1]) if self.lower_bounds else None

    def best_upper(self) -> Optional[Bound]:
        return min(self.upper_bounds, key=lambda b: b[1]) if self.upper_bounds else None

    def merge(self, other: "MuReport") -> "MuReport":
        return MuReport(
            n=self.n,
            exact=self.exact if self.exact is not None else other.exact,
            lower_bounds=self.lower_bounds + other.lower_bounds,
            upper_bounds=self.upper_bounds + other.upper_bounds,
            subsets_enumerated=self.subsets_enumerated + other.subsets_enumerated,
            elapsed=self.elapsed + other.elapsed,
            estimates={**self.estimates, **other.estimates},
            notes={**self.notes, **other.notes},
        )

    def log2_exact(self) -> Optional[float]:
        return math.log2(self.exact) if self.exact is not None else None

    def to_record(self, digits: int = 6) -> str:
        """Stable single-line record; excludes ``elapsed``."""
        parts = [f"n={self.n}", f"exact={'' if self.exact is None else self.exact}"]
        parts.append("lower=" + ",".join(f"{t}:{v:.{digits}f}" for t, v in self.lower_bounds))
        parts.append("upper=" + ",".join(f"{t}:{v:.{digits}f}" for t, v in self.upper_bounds))
        parts.append(f"subsets={self.subsets_enumerated}")
        if self.estimates:
            parts.append("estimates=" + ",".join(f"{k}:{v:.{digits}f}" for k, v in sorted(self.estimates.items())))
        return " ".join(parts)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": self.n,
            "exact": self.exact,
            "lower_bounds": [[t, v] for t, v in self.lower_bounds],
            "upper_bounds": [[t, v] for t, v in self.upper_bounds],
            "subsets_enumerated": self.subsets_enumerated,
            "estimates": dict(sorted(self.estimates.items())),
            "notes": dict(sorted(self.notes.items())),
        }

    def __repr__(self) -> str:
        return f"MuReport({self.to_record(3)})"


# ---------------------------------------------------------------------------
# Exact
# ---------------------------------------------------------------------------


def _exact_range(task: Tuple[Tuple[int, ...], int, int]) -> Set[Tuple[int, int]]:
    rows, lo, hi = task
    seen: Set[Tuple[int, int]] = set()
    for s in range(lo, hi):
        members = list(iter_bits(s))
        seen.add(canonical_key(len(members), induced_rows(rows, members)))
    return seen


def _check_kernel(g: Graph, cap: Optional[int], default: int, what: str) -> None:
    limit = min(default if cap is None else cap, KERNEL_MAX_N)
    if g.n > limit:
        raise CapExceeded(what, g.n, limit)


def mu_exact(g: Graph, *, workers: Optional[int] = None, cap: Optional[int] = None) -> MuReport:
    """
    Exact mu(G) over all 2^n subsets.

    The subset range is cut into contiguous chunks; each chunk yields a private
    certificate set and the count is the size of their union.
    """
    _check_kernel(g, cap, DEFAULT_EXACT_CAP, "mu_exact")
    start = time.perf_counter()
    total = 1 << g.n
    n_workers = resolve_workers(workers)
    chunks = 1 if n_workers == 1 else min(total, n_workers * 8)
    bounds = [total * i // chunks for i in range(chunks + 1)]
    tasks = [(g.rows, bounds[i], bounds[i + 1]) for i in range(chunks)]
    union: Set[Tuple[int, int]] = set()
    for part in indexed_map(_exact_range, tasks, workers=n_workers):
        union |= part
    return MuReport(
        n=g.n,
        exact=len(union),
        subsets_enumerated=total,
        elapsed=time.perf_counter() - start,
    )


def mu_oracle_naive(g: Graph, *, cap: Optional[int] = None) -> int:
    """Equivalence classes of subsets under brute-force isomorphism (no canonical forms)."""
    limit = DEFAULT_NAIVE_CAP if cap is None else cap
    if g.n > limit:
        raise CapExceeded("mu_oracle_naive", g.n, limit)
    reps: Dict[Tuple[int, int, Tuple[int, ...]], List[Graph]] = {}
    count = 0
    for s in range(1 << g.n):
        h = induced_subgraph(g, s)
        key = (h.n, h.edge_count(), tuple(sorted(h.degrees())))
        bucket = reps.setdefault(key, [])
        if not any(brute_force_isomorphic(h, r) for r in bucket):
            bucket.append(h)
            count += 1
    return count


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


def _draw_subset(n: int, seed: Seed, cap: int) -> VertexSet:
    if n <= cap:
        return sample_subset(n, seed)
    for attempt in range(1000):
        s = sample_subset(n, seed.substream("resample", attempt))
        if s.bit_count() <= cap:
            return s
    raise CapExceeded("mu_sample_lower subset size", n, cap)


def mu_sample_lower(
    g: Graph,
    samples: int,
    seed: Seed,
    *,
    cap: Optional[int] = None,
) -> MuReport:
    """
    Monte Carlo lower bounds from ``samples`` uniform subsets.

    Sample i uses its own substream, so a longer run extends a shorter one.
    The distinct-type count is a certified lower bound. The collision estimate
    1/c (c = fraction of colliding sample pairs) bounds the support from below
    in expectation only, so it goes to ``estimates`` with its delta-method variance.
    When n exceeds the canonicalization cap, subsets larger than the cap are
    redrawn, which biases the sample toward small subsets.
    """
    limit = min(DEFAULT_CANON_CAP if cap is None else cap, KERNEL_MAX_N)
    if g.n > KERNEL_MAX_N:
        raise CapExceeded("mu_sample_lower", g.n, KERNEL_MAX_N)
    if samples < 1:
        raise DomainError("samples must be >= 1")
    start = time.perf_counter()
    freq: Counter = Counter()
    for i in range(samples):
        s = _draw_subset(g.n, seed.substream("subset", i), limit)
        members = list(iter_bits(s))
        freq[canonical_key(len(members), induced_rows(g.rows, members))] += 1
    distinct = len(freq)
    report = MuReport(
        n=g.n,
        lower_bounds=[("distinct-sample", math.log2(distinct))],
        subsets_enumerated=samples,
    )
    report.estimates.update(_collision_estimates(list(freq.values()), samples))
    if g.n > limit:
        report.notes["size-bias"] = f"subsets larger than {limit} were redrawn"
    report.elapsed = time.perf_counter() - start
    return report


def _collision_estimates(counts: Sequence[int], samples: int) -> Dict[str, float]:
    if samples < 2:
        return {}
    pairs = samples * (samples - 1) / 2.0
    collisions = math.fsum(c * (c - 1) / 2.0 for c in counts)
    rate = collisions / pairs
    p = np.asarray(counts, dtype=np.float64) / samples
    s2 = float(np.sum(p**2))
    s3 = float(np.sum(p**3))
    zeta1 = max(s3 - s2 * s2, 0.0)
    zeta2 = max(s2 - s2 * s2, 0.0)
    m = samples
    var = 4.0 * (m - 2) / (m * (m - 1)) * zeta1 + 2.0 / (m * (m - 1)) * zeta2
    out = {"collision_rate": rate, "collision_rate_var": var}
    if rate > 0:
        out["collision_log2"] = -math.log2(rate)
        out["collision_log2_var"] = var / (rate * rate * math.log(2.0) ** 2)
    return out


# ---------------------------------------------------------------------------
# Lower certificates
# ---------------------------------------------------------------------------


def _component_key(g: Graph, comp: VertexSet, cap: int) -> Tuple[Any, ...]:
    k = comp.bit_count()
    if k <= cap:
        return ("canon", canonical_form(induced_subgraph(g, comp), cap=cap))
    sub = induced_subgraph(g, comp)
    return ("invariant", k, sub.edge_count(), tuple(sorted(sub.degrees())))


def _best_comb_segment(g: Graph, path: List[int]) -> List[int]:
    """Longest sub-path whose interior vertices all have an off-path neighbour."""
    pmask = mask_of(path)
    bad = [i for i, v in enumerate(path) if not g.rows[v] & ~pmask]
    cuts = [0] + bad + [len(path) - 1]
    best = (0, 0)
    for a, b in zip(cuts, cuts[1:]):
        if b - a > best[1] - best[0]:
            best = (a, b)
    return path[best[0] : best[1] + 1]


class CombCertificate(NamedTuple):
    value: Optional[float]
    extraction: Optional[CombExtraction]
    path_length: int
    reason: str = ""


def comb_certificate(
    g: Graph,
    seed: Seed,
    *,
    path: Optional[Sequence[int]] = None,
    tries: int = DEFAULT_PATH_TRIES,
) -> CombCertificate:
    """
    log2 mu >= |U*| - 1 from an induced comb.

    The path (found heuristically unless given) is trimmed to its longest stretch
    whose interior vertices all have an off-path neighbour before the teeth are chosen.
    """
    found = list(path) if path is not None else find_induced_path(g, tries, seed.substream("comb-path"))
    segment = _best_comb_segment(g, found) if len(found) >= 2 else found
    if len(segment) < 2:
        return CombCertificate(None, None, len(found), "no induced path with two or more vertices")
    comb = extract_comb(g, segment)
    if comb.u_star_size < 1:
        return CombCertificate(None, comb, len(found), f"no usable teeth on an induced path of length {len(segment)}")
    return CombCertificate(float(comb.u_star_size - 1), comb, len(found))


def mu_lower_certificates(
    g: Graph,
    p_hint: Optional[float] = None,
    seed: Optional[Seed] = None,
    *,
    path: Optional[Sequence[int]] = None,
    tries: int = DEFAULT_PATH_TRIES,
    aut_cap: Optional[int] = None,
    canon_cap: Optional[int] = None,
) -> MuReport:
    """
    Constructive lower bounds on log2 mu(G), each tagged:

    - ``tree-components``: m pairwise non-isomorphic tree components give 2^m
      distinct disjoint unions
    - ``component-multisets``: components grouped by type t with multiplicity r_t
      give prod (r_t + 1) distinct unions
    - ``comb``: an induced comb with |U*| teeth gives 2^(|U*|-1)
    - ``type-tuples``: core kept, one rooted subtree per pendant tree,
      sum log2 f(T_v) - log2 |Aut(core)|

    Inapplicable certificates are listed in ``notes`` with the reason.
    ``p_hint`` is recorded only; none of the certificates depend on it.
    """
    start = time.perf_counter()
    seed = seed or Seed(0)
    ccap = DEFAULT_CANON_CAP if canon_cap is None else canon_cap
    acap = DEFAULT_AUT_CAP if aut_cap is None else aut_cap
    lower: List[Bound] = []
    notes: Dict[str, str] = {}
    estimates: Dict[str, float] = {}
    if p_hint is not None:
        estimates["p_hint"] = float(p_hint)

    census = component_census(g)
    tree_types = sum(len(types) for types in census.tree_types.values())
    if tree_types:
        lower.append(("tree-components", float(tree_types)))
    else:
        notes["tree-components"] = "no tree components"

    groups: Counter = Counter()
    for comp in census.trees + census.cyclic:
        groups[_component_key(g, comp, ccap)] += 1
    if g.n:
        lower.append(("component-multisets", math.fsum(math.log2(r + 1) for r in groups.values())))

    comb = comb_certificate(g, seed, path=path, tries=tries)
    if comb.value is not None:
        lower.append(("comb", comb.value))
    else:
        notes["comb"] = comb.reason

    dec = core_decompose(g)
    if dec.core_size == 0:
        notes["type-tuples"] = "empty core"
    elif dec.core_size > acap:
        notes["type-tuples"] = f"core has {dec.core_size} vertices, above automorphism cap {acap}"
    else:
        aut = automorphism_count(core_graph(g, dec), cap=acap)
        total = math.fsum(subtree_count_lower(dec.pendant[v]).ln_f for v in dec.core_list()) / math.log(2.0)
        value = total - math.log2(aut)
        if value > 0:
            lower.append(("type-tuples", value))
        else:
            notes["type-tuples"] = f"non-positive value {value:.6f}"

    return MuReport(
        n=g.n,
        lower_bounds=lower,
        notes=notes,
        estimates=estimates,
        elapsed=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# Upper bounds
# ---------------------------------------------------------------------------


def default_threshold(n: int) -> int:
    """ceil(2 ln ln n), at least 1."""
    if n < 3:
        return 1
    return max(1, math.ceil(2.0 * math.log(math.log(n))))


def _connected_classes(h: Graph) -> Dict[bytes, Tuple[int, int]]:
    """Canonical form -> (vertices, edges) for every connected induced subgraph of a small graph."""
    out: Dict[bytes, Tuple[int, int]] = {}
    for s in range(1, 1 << h.n):
        sub = induced_subgraph(h, s)
        if len(components(sub)) == 1:
            out.setdefault(canonical_form(sub), (sub.n, sub.edge_count()))
    return out


def mu_upper_subcritical(g: Graph, t: Optional[int] = None) -> MuReport:
    """
    Two bounds of the form log2 mu <= |U| + sum_{k<=t} c_k log2(floor(n/k) + 1).

    U is the union of components with more than t vertices. Every induced
    subgraph is an induced subgraph of G[U] plus a multiset of connected graphs
    taken from the small components, with at most floor(n/k) copies of any class
    on k vertices.

    - ``subcritical``: c_k = k^3 4^k (tree and unicyclic classes) plus the
      complex classes of size k found inside small components
    - ``subcritical-observed``: c_k = number of connected classes of size k
      found inside small components
    """
    start = time.perf_counter()
    n = g.n
    thr = default_threshold(n) if t is None else t
    census = component_census(g, type_limit=0)
    big = 0
    small_types: Dict[bytes, Graph] = {}
    for comp in census.trees + census.cyclic:
        k = comp.bit_count()
        if k > thr:
            big += k
            continue
        h = induced_subgraph(g, comp)
        small_types.setdefault(canonical_form(h), h)
    classes: Dict[bytes, Tuple[int, int]] = {}
    for h in small_types.values():
        classes.update(_connected_classes(h))
    observed = Counter(k for k, _ in classes.values())
    complex_count = Counter(k for k, e in classes.values() if e >= k + 1)
    class_terms = []
    observed_terms = []
    for k in range(1, min(thr, n) + 1):
        width = math.log2(n // k + 1)
        class_terms.append((formulas.small_class_bound(k) + complex_count[k]) * width)
        observed_terms.append(observed[k] * width)
    report = MuReport(
        n=n,
        upper_bounds=[
            ("subcritical", big + math.fsum(class_terms)),
            ("subcritical-observed", big + math.fsum(observed_terms)),
        ],
        elapsed=time.perf_counter() - start,
    )
    report.estimates["threshold"] = float(thr)
    report.estimates["large_vertices"] = float(big)
    return report


def mu_upper_structural(g: Graph, *, p: Optional[float] = None, xi_max_n: int = 4000) -> MuReport:
    """
    Elementary upper bounds:

    - ``trivial``: n
    - ``isolated``: i isolated vertices give mu <= (i + 1) 2^(n - i)
    - ``xi-pairs``: the best pair (x, x') gives 2^xi distinct sets W + x' each
      isomorphic to W + x, so mu <= 2^n - 2^xi
    """
    n = g.n
    upper: List[Bound] = [("trivial", float(n))]
    i = isolated_vertices(g)
    if i:
        upper.append(("isolated", math.log2(i + 1) + (n - i)))
    estimates: Dict[str, float] = {}
    if 2 <= n <= xi_max_n:
        stats = xi_stats(g, 0.5 if p is None else p)
        xi = stats.xi_max
        upper.append(("xi-pairs", n + math.log2(-math.expm1((xi - n) * math.log(2.0)))))
        estimates["xi_max"] = float(xi)
    return MuReport(n=n, upper_bounds=upper, estimates=estimates)


def mu_bounds(
    g: Graph,
    *,
    p_hint: Optional[float] = None,
    seed: Optional[Seed] = None,
    exact: bool = False,
    workers: Optional[int] = None,
) -> MuReport:
    """All lower certificates and upper bounds in one report; exact value too when requested."""
    report = mu_lower_certificates(g, p_hint, seed)
    report = report.merge(mu_upper_subcritical(g)).merge(mu_upper_structural(g, p=p_hint))
    if exact:
        report = report.merge(mu_exact(g, workers=workers))
    report.check()
    return report


# ---------------------------------------------------------------------------
# Edge concentration
# ---------------------------------------------------------------------------


class EdgeConcentrationReport(NamedTuple):
    min_ratio: float
    max_ratio: float
    threshold_size: int
    tested: int
    exhaustive: bool

    def within(self, lo: float, hi: float) -> bool:
        return lo <= self.min_ratio and self.max_ratio <= hi


def edge_concentration(
    g: Graph,
    u: VertexSet,
    min_size: int,
    trials: int = DEFAULT_EDGE_TRIALS,
    seed: Optional[Seed] = None,
    *,
    p_hat: Optional[float] = None,
    regular_degree: Optional[int] = None,
) -> EdgeConcentrationReport:
    """
    Ratios |E(G[W])| / expected over subsets W of u with |W| >= min_size.

    Expected count is C(|W|,2) p_hat (p_hat defaults to the edge density of g) or,
    with ``regular_degree=d``, d |W|^2 / (2n). Exhaustive when |u| <= 20, otherwise
    ``trials`` random subsets with uniformly drawn sizes. A zero expectation
    yields ratio 0.
    """
    if min_size < 2:
        raise DomainError("min_size must be >= 2")
    members = list(iter_bits(u))
    if len(members) < min_size:
        raise DomainError(f"|U|={len(members)} is smaller than min_size={min_size}")
    n = g.n
    if p_hat is None and regular_degree is None:
        pairs = n * (n - 1) / 2
        p_hat = g.edge_count() / pairs if pairs else 0.0

    def expected(k: int) -> float:
        if regular_degree is not None:
            return regular_degree * k * k / (2.0 * n)
        return k * (k - 1) / 2.0 * float(p_hat)

    def ratio(w: VertexSet) -> float:
        e = expected(w.bit_count())
        return g.edges_within(w) / e if e > 0 else 0.0

    ratios: List[float] = []
    smallest = len(members)
    exhaustive = len(members) <= DEFAULT_EXHAUSTIVE_SUBSET_MAX
    if exhaustive:
        for bits in range(1 << len(members)):
            if bits.bit_count() < min_size:
                continue
            w = mask_of(members[i] for i in iter_bits(bits))
            ratios.append(ratio(w))
            smallest = min(smallest, bits.bit_count())
    else:
        rng = (seed or Seed(0)).generator()
        arr = np.asarray(members)
        for _ in range(trials):
            k = int(rng.integers(min_size, len(members) + 1))
            w = mask_of(int(v) for v in rng.choice(arr, size=k, replace=False))
            ratios.append(ratio(w))
            smallest = min(smallest, k)
    return EdgeConcentrationReport(min(ratios), max(ratios), smallest, len(ratios), exhaustive)


# ---------------------------------------------------------------------------
# Subgraph probability in random regular graphs
# ---------------------------------------------------------------------------


def mckay_log_prob(n: int, d: int, h_degrees: Sequence[int], h_edges: int) -> float:
    """
    ln of prod_j d(d-1)...(d-deg_j+1) / (2^|E(H)| (dn/2)(dn/2-1)...(dn/2-|E(H)|+1)),
    the main term for P(H subset of G) in a uniform d-regular graph.
    """
    if n < 1 or d < 0:
        raise DomainError("need n >= 1 and d >= 0")
    if len(h_degrees) > n:
        raise DomainError(f"degree sequence longer than n={n}")
    if any(x < 0 or x > d for x in h_degrees):
        raise DomainError(f"every H degree must lie in [0, {d}]")
    if sum(h_degrees) != 2 * h_edges:
        raise DomainError("h_edges must equal half the degree sum")
    half = d * n / 2.0
    if h_edges > half:
        raise DomainError(f"h_edges={h_edges} exceeds dn/2={half}")
    falling = math.fsum(math.lgamma(d + 1) - math.lgamma(d - x + 1) for x in h_degrees)
    pairing = math.lgamma(half + 1) - math.lgamma(half - h_edges + 1)
    return falling - h_edges * math.log(2.0) - pairing


__all__ = [
    "MuReport",
    "EdgeConcentrationReport",
    "CombCertificate",
    "comb_certificate",
    "mu_exact",
    "mu_oracle_naive",
    "mu_sample_lower",
    "mu_lower_certificates",
    "mu_upper_subcritical",
    "mu_upper_structural",
    "mu_bounds",
    "edge_concentration",
    "mckay_log_prob",
    "default_threshold",
]
