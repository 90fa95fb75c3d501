"""mulab package

Non-isomorphic induced subgraph counts mu(G): exact enumeration, certified
bounds, and the desk-scale experiments around them.

Public API is re-exported here for convenience.
"""

from .version import __version__
from .graph import (  # noqa: F401
    Graph,
    VertexSet,
    complement,
    complete_graph,
    components,
    cycle_graph,
    disjoint_union,
    empty_graph,
    from_edges,
    induced_subgraph,
    make_comb,
    path_graph,
    permute,
)
from .canon import (  # noqa: F401
    are_isomorphic,
    automorphism_count,
    brute_force_automorphisms,
    brute_force_isomorphic,
    canonical_form,
)
from .rng import Seed, as_seed  # noqa: F401
from .models import (  # noqa: F401
    GWConfig,
    sample_gnp,
    sample_gw_tree,
    sample_max_degree_gnp,
    sample_regular,
    sample_subset,
    sample_subset_in_window,
)
from .trees import (  # noqa: F401
    RootedTree,
    SubtreeCount,
    ahu_code,
    count_subtrees_bruteforce,
    count_subtrees_exact,
    estimate_log_f,
    subtree_count_lower,
)
from .anatomy import (  # noqa: F401
    CoreDecomposition,
    build_contiguous_model,
    conjugate_lambda,
    core_decompose,
    extract_comb,
    find_induced_path,
    second_eigenvalue,
    type_tuple,
    xi_stats,
)
from .mu import (  # noqa: F401
    MuReport,
    comb_certificate,
    edge_concentration,
    mckay_log_prob,
    mu_bounds,
    mu_exact,
    mu_lower_certificates,
    mu_oracle_naive,
    mu_sample_lower,
    mu_upper_structural,
    mu_upper_subcritical,
)
from .codec import format_graph, from_graph6, parse_graphs, read_graph, to_graph6  # noqa: F401
from .errors import (  # noqa: F401
    CapExceeded,
    DegreeTooLow,
    DomainError,
    ErrorCategory,
    ErrorSeverity,
    FailureRecord,
    GraphFormatError,
    MuLabError,
    NotRegular,
    PathNotInduced,
    RetryLimit,
    UsageError,
)
from .runspec import ExperimentSpec, PSpec, default_spec, load_spec  # noqa: F401
from .results import ExperimentResult  # noqa: F401
from .experiments import REGISTRY, check_boring_inequality, run_experiment  # noqa: F401
from .cli import main  # noqa: F401


__all__ = [
    "__version__",
    "Graph",
    "VertexSet",
    "complement",
    "complete_graph",
    "components",
    "cycle_graph",
    "disjoint_union",
    "empty_graph",
    "from_edges",
    "induced_subgraph",
    "make_comb",
    "path_graph",
    "permute",
    "are_isomorphic",
    "automorphism_count",
    "brute_force_automorphisms",
    "brute_force_isomorphic",
    "canonical_form",
    "Seed",
    "as_seed",
    "GWConfig",
    "sample_gnp",
    "sample_gw_tree",
    "sample_max_degree_gnp",
    "sample_regular",
    "sample_subset",
    "sample_subset_in_window",
    "RootedTree",
    "SubtreeCount",
    "ahu_code",
    "count_subtrees_bruteforce",
    "count_subtrees_exact",
    "estimate_log_f",
    "subtree_count_lower",
    "CoreDecomposition",
    "build_contiguous_model",
    "conjugate_lambda",
    "core_decompose",
    "extract_comb",
    "find_induced_path",
    "second_eigenvalue",
    "type_tuple",
    "xi_stats",
    "MuReport",
    "comb_certificate",
    "edge_concentration",
    "mckay_log_prob",
    "mu_bounds",
    "mu_exact",
    "mu_lower_certificates",
    "mu_oracle_naive",
    "mu_sample_lower",
    "mu_upper_structural",
    "mu_upper_subcritical",
    "format_graph",
    "from_graph6",
    "parse_graphs",
    "read_graph",
    "to_graph6",
    "CapExceeded",
    "DegreeTooLow",
    "DomainError",
    "ErrorCategory",
    "ErrorSeverity",
    "FailureRecord",
    "GraphFormatError",
    "MuLabError",
    "NotRegular",
    "PathNotInduced",
    "RetryLimit",
    "UsageError",
    "ExperimentSpec",
    "PSpec",
    "default_spec",
    "load_spec",
    "ExperimentResult",
    "REGISTRY",
    "check_boring_inequality",
    "run_experiment",
    "main",
]
