"""Community search on weighted bipartite graphs.

Hierarchical (alpha, beta)-core indexes answer community queries in time
linear in the answer, and the significant-community search on top of them
returns the connected, degree-constrained subgraph around a query vertex
whose minimum edge weight is largest.
"""

from .bigraph import (
    BipartiteGraph,
    CommunityStats,
    Constant,
    DuplicateEdgeError,
    GraphFormatError,
    GraphStats,
    Layer,
    SkewNormal,
    Uniform,
    UnknownVertexError,
    VertexRef,
    community_stats,
    generate_weights,
    graph_stats,
    load_graph,
    parse_distribution,
)
from .decomp import (
    Community,
    OffsetTable,
    compute_abcore,
    compute_alpha_offsets,
    compute_beta_offsets,
    compute_degeneracy,
    community_online,
)
from .ccindex import (
    CommunityIndex,
    IndexFormatError,
    StaleIndexError,
    build_basic_a,
    build_basic_b,
    build_degeneracy,
    build_index,
    load_index,
    query_community,
    save_index,
)
from .sigsearch import (
    ComponentTracker,
    SignificantCommunity,
    baseline_significant,
    binary_significant,
    bounds_check,
    format_community,
    expand_significant,
    peel_significant,
)
from .maintain import UpdateScope, delete_edge, insert_edge

__version__ = "0.1.0"
