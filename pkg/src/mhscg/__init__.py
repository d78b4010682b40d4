"""Multi-view hypergraph spectral clustering on the Grassmannian manifold."""

__version__ = "0.1.0"

from .cluster import KMeansConfig, best_of_restarts, kmeans, row_normalize
from .dataset import MultiViewDataset, load_dataset, save_dataset, synth_multiview
from .hypergraph import (
    LaplacianPair,
    build_incidence,
    laplacian,
    pairwise_sq_dists,
    sparse_similarity,
    view_laplacian,
)
from .manifold import TrustRegionConfig, dominant_subspace, principal_angles, rtr_maximize
from .metrics import accuracy, adjusted_rand, evaluate, nmi, pairwise_fscore
from .model import MhscgConfig, hsc_single_view, run

__all__ = [
    "KMeansConfig",
    "LaplacianPair",
    "MhscgConfig",
    "MultiViewDataset",
    "TrustRegionConfig",
    "accuracy",
    "adjusted_rand",
    "best_of_restarts",
    "build_incidence",
    "dominant_subspace",
    "evaluate",
    "hsc_single_view",
    "kmeans",
    "laplacian",
    "load_dataset",
    "nmi",
    "pairwise_fscore",
    "pairwise_sq_dists",
    "principal_angles",
    "row_normalize",
    "rtr_maximize",
    "run",
    "save_dataset",
    "sparse_similarity",
    "synth_multiview",
    "view_laplacian",
]
