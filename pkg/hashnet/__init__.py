from hashnet.budget import Budget, run_budgeted
from hashnet.centrality import (
    CentralityReport,
    betweenness,
    centrality_report,
    edge_betweenness,
    eigenvector_centrality,
    vertex_betweenness,
)
from hashnet.ces import CesLexicon, CommunityLabel, classify
from hashnet.community import (
    Dendrogram,
    Merge,
    Partition,
    communities,
    cut_at_max_modularity,
    fast_greedy,
    modularity,
)
from hashnet.config import AreaConfig, RunConfig
from hashnet.cooccur import (
    AreaNetwork,
    MergedNetwork,
    build_network,
    count_pairs,
    coverage_stat,
    merge_networks,
    top_hashtags,
)
from hashnet.exceptions import (
    AnalysisError,
    BudgetException,
    ConvergenceError,
    CpuTimeoutException,
    GraphError,
    HashnetException,
    InputError,
    MemoryLimitException,
    StageError,
    TimeoutException,
    WallTimeoutException,
)
from hashnet.export import export_graph
from hashnet.graph import Vertex, VertexId, WeightedGraph
from hashnet.ingest import (
    EMPTY,
    CleanedPost,
    CleaningRules,
    CleaningSummary,
    Corpus,
    RawPost,
    clean,
    normalize_hashtag,
    parse_posts,
    read_posts,
)
from hashnet.pipeline import AreaReport, MergedReport, run_all, run_area, run_merged
from hashnet.support import (
    supports,
    supports_cputime,
    supports_memory,
    supports_walltime,
)
from hashnet.synth import (
    STUDY_AREAS,
    Ledger,
    SyntheticPlan,
    Theme,
    generate_synthetic,
    study_area_plans,
    write_synthetic,
)

__version__ = "0.1.0"

__all__ = [
    "WeightedGraph",
    "Vertex",
    "VertexId",
    "CentralityReport",
    "eigenvector_centrality",
    "vertex_betweenness",
    "edge_betweenness",
    "betweenness",
    "centrality_report",
    "Merge",
    "Dendrogram",
    "Partition",
    "modularity",
    "fast_greedy",
    "cut_at_max_modularity",
    "communities",
    "EMPTY",
    "RawPost",
    "CleanedPost",
    "CleaningRules",
    "CleaningSummary",
    "Corpus",
    "parse_posts",
    "read_posts",
    "normalize_hashtag",
    "clean",
    "AreaNetwork",
    "MergedNetwork",
    "count_pairs",
    "top_hashtags",
    "coverage_stat",
    "build_network",
    "merge_networks",
    "CesLexicon",
    "CommunityLabel",
    "classify",
    "AreaConfig",
    "RunConfig",
    "AreaReport",
    "MergedReport",
    "run_area",
    "run_merged",
    "run_all",
    "export_graph",
    "Theme",
    "SyntheticPlan",
    "Ledger",
    "STUDY_AREAS",
    "generate_synthetic",
    "write_synthetic",
    "study_area_plans",
    "Budget",
    "run_budgeted",
    "supports",
    "supports_walltime",
    "supports_cputime",
    "supports_memory",
    "HashnetException",
    "InputError",
    "GraphError",
    "AnalysisError",
    "ConvergenceError",
    "StageError",
    "BudgetException",
    "TimeoutException",
    "WallTimeoutException",
    "CpuTimeoutException",
    "MemoryLimitException",
]
