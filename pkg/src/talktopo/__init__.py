"""Topology-augmented rating prediction for talk transcripts.

The pipeline turns each talk's sentence-embedding cloud into a Vietoris-
Rips persistence diagram, rasterizes the diagram into a persistence
image vector, and cross-validates rating classifiers on document
features with and without the topological block.
"""

from .errors import DataError, ResourceLimitError, TrainingError
from .filtration import Filtration, build_filtration, index_to_simplex, simplex_index
from .learn import (
    FEATURE_SPECS,
    MODEL_KINDS,
    RATING_CATEGORIES,
    CrossValidationResult,
    Hyperparams,
    LabeledDataset,
    RatingRecord,
    Standardizer,
    TrainedModel,
    assemble_features,
    binarize_labels,
    cross_validate,
    fold_indices,
    train_linear_svm,
    train_logreg,
    train_mlp,
)
from .metrics import (
    METRICS,
    DistanceMatrix,
    PointCloud,
    angular_dissimilarity,
    euclidean_distance,
    paper_literal_dissimilarity,
    pairwise_distances,
)
from .persistence import (
    PersistenceDiagram,
    betti_bruteforce,
    compute_h0_unionfind,
    compute_persistence,
)
from .pimage import (
    PersistenceImage,
    PivConfig,
    birth_persistence_transform,
    piv_stability_constant,
    rasterize,
    surface_value,
)
from .pipeline import (
    CorpusManifest,
    IngestResult,
    RunArtifacts,
    generate_synthetic_corpus,
    ingest,
    load_manifest,
    run_pipeline,
)
from .plots import plot_diagram_svg, plot_piv_svg
from .wasserstein import (
    DiagonalAugmentedMatching,
    wasserstein,
    wasserstein_bruteforce,
    wasserstein_matching,
)

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "ResourceLimitError",
    "TrainingError",
    "Filtration",
    "build_filtration",
    "simplex_index",
    "index_to_simplex",
    "METRICS",
    "PointCloud",
    "DistanceMatrix",
    "pairwise_distances",
    "angular_dissimilarity",
    "paper_literal_dissimilarity",
    "euclidean_distance",
    "PersistenceDiagram",
    "compute_persistence",
    "compute_h0_unionfind",
    "betti_bruteforce",
    "PersistenceImage",
    "PivConfig",
    "birth_persistence_transform",
    "rasterize",
    "surface_value",
    "piv_stability_constant",
    "DiagonalAugmentedMatching",
    "wasserstein",
    "wasserstein_matching",
    "wasserstein_bruteforce",
    "RATING_CATEGORIES",
    "FEATURE_SPECS",
    "MODEL_KINDS",
    "RatingRecord",
    "binarize_labels",
    "assemble_features",
    "LabeledDataset",
    "Standardizer",
    "Hyperparams",
    "TrainedModel",
    "train_logreg",
    "train_linear_svm",
    "train_mlp",
    "fold_indices",
    "cross_validate",
    "CrossValidationResult",
    "CorpusManifest",
    "IngestResult",
    "RunArtifacts",
    "load_manifest",
    "ingest",
    "run_pipeline",
    "generate_synthetic_corpus",
    "plot_diagram_svg",
    "plot_piv_svg",
    "__version__",
]
