"""Statistical versus topological clustering of FX reference-rate series.

The library ingests daily reference-rate CSVs, builds a standardised
monthly log-return panel, extracts both classical statistical features
(covariance, correlations, STL) and topological features (delay
embedding, Rips persistence, Wasserstein distances), clusters each
feature space with k-means and complete-linkage hierarchical
clustering, and scores all four models with Silhouette and
Calinski-Harabasz indices.
"""

from .cluster import (
    ClusterAssignment,
    Dendrogram,
    classical_mds,
    elbow_curve,
    hierarchical_complete,
    kmeans,
)
from .config import DEFAULT_CURRENCIES, ConfigError, PipelineConfig, SensitivityCase
from .embedding import (
    DistanceMatrix,
    EmbeddingError,
    PointCloud,
    delay_embed,
    pairwise_distances,
    pca_project,
)
from .evaluate import (
    EvaluationReport,
    ModelScore,
    SensitivityReport,
    SensitivityRow,
    UndefinedMetricError,
    adjusted_rand,
    calinski_harabasz,
    mantel,
    nmi,
    silhouette,
)
from .ingest import (
    CsvParseError,
    DegenerateColumnError,
    DisjointRangesError,
    EmptyInputError,
    IngestError,
    RatePanel,
    ReturnPanel,
    log_returns,
    merge_and_interpolate,
    parse_rate_csv,
    read_panel_csv,
    read_wide_csv,
    resample_monthly,
    standardize,
    write_panel_csv,
)
from .persistence import PersistenceDiagram, read_diagrams_csv, rips_persistence, write_diagrams_csv
from .pipeline import PipelineError, PipelineResult, run_pipeline, run_sensitivity
from .stats import (
    InsufficientDataError,
    StlDecomposition,
    SymmetricMatrix,
    UndefinedCorrelationError,
    covariance_matrix,
    cross_correlation_matrix,
    pearson_matrix,
    spearman_matrix,
    stl_decompose,
    variance_summary,
)
from .summaries import (
    BettiCurve,
    PersistenceLandscape,
    barcode,
    betti_curve,
    bottleneck,
    diagram_distance_matrix,
    landscape,
    wasserstein,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterAssignment", "Dendrogram", "classical_mds", "elbow_curve",
    "hierarchical_complete", "kmeans",
    "DEFAULT_CURRENCIES", "ConfigError", "PipelineConfig", "SensitivityCase",
    "DistanceMatrix", "EmbeddingError", "PointCloud", "delay_embed",
    "pairwise_distances", "pca_project",
    "EvaluationReport", "ModelScore", "SensitivityReport", "SensitivityRow",
    "UndefinedMetricError", "adjusted_rand", "calinski_harabasz", "mantel",
    "nmi", "silhouette",
    "CsvParseError", "DegenerateColumnError", "DisjointRangesError",
    "EmptyInputError", "IngestError", "RatePanel", "ReturnPanel",
    "log_returns", "merge_and_interpolate", "parse_rate_csv",
    "read_panel_csv", "read_wide_csv", "resample_monthly", "standardize",
    "write_panel_csv",
    "PersistenceDiagram", "read_diagrams_csv", "rips_persistence",
    "write_diagrams_csv",
    "PipelineError", "PipelineResult", "run_pipeline", "run_sensitivity",
    "InsufficientDataError", "StlDecomposition", "SymmetricMatrix",
    "UndefinedCorrelationError", "covariance_matrix",
    "cross_correlation_matrix", "pearson_matrix", "spearman_matrix",
    "stl_decompose", "variance_summary",
    "BettiCurve", "PersistenceLandscape", "barcode", "betti_curve",
    "bottleneck", "diagram_distance_matrix", "landscape", "wasserstein",
    "__version__",
]
