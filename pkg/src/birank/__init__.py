"""Ranking toolkit for bipartite graphs.

Implements a PageRank-style chain whose teleportation stays inside the
surfer's current side of the bipartition, alongside classic PageRank and
an NCD-aware variant, with matrix-free kernels, convergence diagnostics,
spectral verification, dataset ingestion, and a CLI.
"""

__version__ = "0.1.0"

from .analysis import (
    ComparisonReport,
    CouplingReport,
    SpectralReport,
    compare_rankings,
    dense_oracle,
    estimate_lambda2,
    is_strongly_connected,
    ncd_coupling,
    period,
    spectral_report,
    verify_structural_eigenpair,
)
from .errors import BirankError
from .graph import BipartiteGraph, SparseRows, build_graph
from .ingest import (
    CleanReport,
    EdgeList,
    GraphStats,
    clean_edge_list,
    compute_stats,
    drop_isolated,
    giant_component,
    parse_konect,
    parse_matrix_market,
    parse_tsv,
)
from .operators import (
    Partition,
    RankParams,
    RankVector,
    bipartiterank_step,
    block_teleport_matvec,
    build_ncd_teleport,
    link_matvec,
    ncdaware_step,
    pagerank_step,
    side_partition,
)
from .rankers import (
    ConvergenceReport,
    RankingResult,
    bipartite_rank,
    ncdaware_rank,
    page_rank,
    power_method,
)
from .synth import SyntheticSpec, generate_bipartite

__all__ = [
    "__version__",
    "BirankError",
    "BipartiteGraph",
    "SparseRows",
    "build_graph",
    "EdgeList",
    "GraphStats",
    "CleanReport",
    "parse_konect",
    "parse_matrix_market",
    "parse_tsv",
    "drop_isolated",
    "giant_component",
    "clean_edge_list",
    "compute_stats",
    "Partition",
    "RankParams",
    "RankVector",
    "side_partition",
    "link_matvec",
    "block_teleport_matvec",
    "pagerank_step",
    "bipartiterank_step",
    "build_ncd_teleport",
    "ncdaware_step",
    "ConvergenceReport",
    "RankingResult",
    "power_method",
    "bipartite_rank",
    "page_rank",
    "ncdaware_rank",
    "SpectralReport",
    "CouplingReport",
    "ComparisonReport",
    "verify_structural_eigenpair",
    "estimate_lambda2",
    "spectral_report",
    "is_strongly_connected",
    "period",
    "ncd_coupling",
    "compare_rankings",
    "dense_oracle",
    "SyntheticSpec",
    "generate_bipartite",
]
