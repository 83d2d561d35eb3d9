"""Multimodal diffusion geometry via joint diagonalization of graph Laplacians."""

from .averaging import Arithmetic, Harmonic, SquaredSum, average_laplacian, null_space_clustering_matrix
from .errors import (
    DataError,
    DegenerateScaleError,
    IsolatedVertexError,
    ParameterError,
    SpecfuseError,
)
from .evaluation import RocCurve, clustering_accuracy, roc_from_distances
from .graph import (
    FixedScale,
    Laplacian,
    NeighborGraph,
    PointCloud,
    SelfTuning,
    WeightGraph,
    gaussian_weights,
    knn_graph,
    kth_neighbor_distance,
    sym_normalized_laplacian,
)
from .jade import (
    JadeOptions,
    JointBasis,
    MatrixSet,
    jade,
    joint_eigendecomposition_report,
    off_norm,
    rotation_for_pair,
)
from .spectral import (
    ClusterResult,
    CustomKernel,
    DiffusionEmbedding,
    HeatKernel,
    IdentityKernel,
    diffusion_distance_matrix,
    diffusion_map,
    eig_sym,
    farthest_point_sampling,
    kmeans,
    rescale_eigenvalues,
    spectral_clustering,
)
from .synth import MultimodalDataset, blobs, circles, swiss_roll_pair

__version__ = "0.1.0"

__all__ = [
    "Arithmetic",
    "ClusterResult",
    "CustomKernel",
    "DataError",
    "DegenerateScaleError",
    "DiffusionEmbedding",
    "FixedScale",
    "Harmonic",
    "HeatKernel",
    "IdentityKernel",
    "IsolatedVertexError",
    "JadeOptions",
    "JointBasis",
    "Laplacian",
    "MatrixSet",
    "MultimodalDataset",
    "NeighborGraph",
    "ParameterError",
    "PointCloud",
    "RocCurve",
    "SelfTuning",
    "SpecfuseError",
    "SquaredSum",
    "WeightGraph",
    "average_laplacian",
    "blobs",
    "circles",
    "clustering_accuracy",
    "diffusion_distance_matrix",
    "diffusion_map",
    "eig_sym",
    "farthest_point_sampling",
    "gaussian_weights",
    "jade",
    "joint_eigendecomposition_report",
    "kmeans",
    "knn_graph",
    "kth_neighbor_distance",
    "null_space_clustering_matrix",
    "off_norm",
    "rescale_eigenvalues",
    "roc_from_distances",
    "rotation_for_pair",
    "spectral_clustering",
    "swiss_roll_pair",
    "sym_normalized_laplacian",
]
