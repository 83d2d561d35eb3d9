"""Affinity graphs and symmetric normalized Laplacians from point clouds.

The pipeline here is: points -> k-nearest-neighbor structure (union
symmetrized) -> Gaussian edge weights (fixed or self-tuning scale) ->
symmetric normalized Laplacian L = D^{-1/2} (D - W) D^{-1/2}.

Laplacians are returned dense: the joint diagonalization downstream applies
plane rotations that destroy sparsity anyway. Practical size cap is a few
thousand points (n <= ~3000).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.spatial.distance import cdist

from .errors import DegenerateScaleError, IsolatedVertexError, ParameterError

_DIST_BLOCK = 256  # row block for pairwise-distance scans, bounds memory at ~block*n


@dataclass(frozen=True)
class PointCloud:
    """One modality: an (n, d) feature matrix with optional class labels.

    Rows of every modality in an experiment must correspond sample-by-sample.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    modality_name: str = ""

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ParameterError("points must be a 2-d array (rows = samples)")
        if pts.shape[0] < 2 or pts.shape[1] < 1:
            raise ParameterError(
                f"need at least 2 samples and 1 feature, got shape {pts.shape}"
            )
        if not np.isfinite(pts).all():
            raise ParameterError("points contain NaN or Inf entries")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.asarray(self.labels)
            if lab.shape != (pts.shape[0],):
                raise ParameterError(
                    f"labels must have length {pts.shape[0]}, got shape {lab.shape}"
                )
            lab = lab.astype(np.int64, copy=True)
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class NeighborGraph:
    """Union-symmetrized k-NN structure.

    ``indices[i]`` / ``distances[i]`` list the neighbors of point i after
    union symmetrization (edge kept if either endpoint selected the other),
    ordered by (distance, index). ``points`` is retained so that scale
    estimators can run additional neighbor queries.
    """

    points: np.ndarray
    neighbor_count: int
    indices: tuple
    distances: tuple

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def edge_list(self):
        """Unique undirected edges as (rows, cols, dists) with rows < cols."""
        rows, cols, dists = [], [], []
        for i, (nbrs, ds) in enumerate(zip(self.indices, self.distances)):
            keep = nbrs > i
            rows.append(np.full(int(keep.sum()), i, dtype=np.int64))
            cols.append(nbrs[keep])
            dists.append(ds[keep])
        return np.concatenate(rows), np.concatenate(cols), np.concatenate(dists)


@dataclass(frozen=True)
class FixedScale:
    """Gaussian weights w_ij = exp(-d_ij^2 / t) with a global scale t > 0."""

    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ParameterError(f"fixed scale t must be > 0, got {self.t}")


@dataclass(frozen=True)
class SelfTuning:
    """Per-point bandwidths: w_ij = exp(-d_ij^2 / (sigma_i * sigma_j)).

    sigma_i is the distance from point i to its k_st-th nearest neighbor;
    the canonical choice is the 7th.
    """

    k_st: int = 7

    def __post_init__(self):
        if self.k_st < 1:
            raise ParameterError(f"self-tuning neighbor index must be >= 1, got {self.k_st}")


@dataclass(frozen=True)
class WeightGraph:
    """Symmetric sparse affinity matrix with strictly positive degrees."""

    weights: sp.csr_matrix
    degrees: np.ndarray = field(init=False)
    neighbor_count: int = 0

    def __post_init__(self):
        w = sp.csr_matrix(self.weights)
        if w.shape[0] != w.shape[1]:
            raise ParameterError(f"weight matrix must be square, got {w.shape}")
        if w.nnz and (w.data < 0).any():
            raise ParameterError("edge weights must be nonnegative")
        if w.nnz and (w.data > 1).any():
            raise ParameterError("edge weights must lie in [0, 1]")
        if w.diagonal().any():
            raise ParameterError("weight matrix must have a zero diagonal")
        asym = (w - w.T).tocoo()
        if asym.nnz and np.abs(asym.data).max() > 0:
            raise ParameterError("weight matrix must be exactly symmetric")
        object.__setattr__(self, "weights", w)
        deg = np.asarray(w.sum(axis=1)).ravel()
        deg.setflags(write=False)
        object.__setattr__(self, "degrees", deg)
        zero = np.flatnonzero(deg == 0.0)
        if zero.size:
            raise IsolatedVertexError(
                f"vertex {zero[0]} has zero degree; increase the neighbor count k "
                "or the weight scale so every point keeps at least one edge"
            )

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class Laplacian:
    """Dense symmetric normalized Laplacian, spectrum contained in [0, 2]."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ParameterError(f"Laplacian must be square, got shape {m.shape}")
        scale = np.abs(m).max()
        if scale > 0 and np.abs(m - m.T).max() > 1e-12 * scale:
            raise ParameterError("Laplacian matrix is not symmetric to 1e-12 relative tolerance")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def _block_rows(points):
    """Yield (start, dist_block) pairs of exact Euclidean distances."""
    n = points.shape[0]
    for start in range(0, n, _DIST_BLOCK):
        stop = min(start + _DIST_BLOCK, n)
        yield start, cdist(points[start:stop], points)


def kth_neighbor_distance(points: np.ndarray, k: int) -> np.ndarray:
    """Distance from each point to its k-th nearest neighbor (self excluded)."""
    n = points.shape[0]
    if not 1 <= k < n:
        raise ParameterError(f"neighbor index must satisfy 1 <= k < n, got k={k}, n={n}")
    out = np.empty(n)
    for start, block in _block_rows(points):
        for r in range(block.shape[0]):
            row = block[r].copy()
            row[start + r] = np.inf  # exclude self
            out[start + r] = np.partition(row, k - 1)[k - 1]
    return out


def knn_graph(cloud: PointCloud, k: int) -> NeighborGraph:
    """Union-symmetrized k-nearest-neighbor graph with exact distances.

    An edge (i, j) is kept iff j is among the k Euclidean-nearest neighbors
    of i or vice versa. Ties are broken by the lower point index, so the
    result is deterministic. Self edges are excluded.
    """
    n = cloud.n
    if not 1 <= k < n:
        raise ParameterError(f"k must satisfy 1 <= k < n, got k={k}, n={n}")
    pts = cloud.points

    knn_idx = np.empty((n, k), dtype=np.int64)
    knn_dist = np.empty((n, k))
    col_ids = np.arange(n)
    for start, block in _block_rows(pts):
        for r in range(block.shape[0]):
            i = start + r
            row = block[r].copy()
            row[i] = np.inf
            order = np.lexsort((col_ids, row))[:k]
            knn_idx[i] = order
            knn_dist[i] = row[order]

    # union symmetrization on the directed selections
    adj = [dict(zip(knn_idx[i], knn_dist[i])) for i in range(n)]
    for i in range(n):
        for j, d in zip(knn_idx[i], knn_dist[i]):
            adj[j].setdefault(i, d)

    indices, distances = [], []
    for i in range(n):
        nbrs = np.fromiter(adj[i].keys(), dtype=np.int64, count=len(adj[i]))
        ds = np.fromiter(adj[i].values(), dtype=np.float64, count=len(adj[i]))
        order = np.lexsort((nbrs, ds))
        indices.append(nbrs[order])
        distances.append(ds[order])
    return NeighborGraph(
        points=pts, neighbor_count=k, indices=tuple(indices), distances=tuple(distances)
    )


def gaussian_weights(neighbors: NeighborGraph, scale) -> WeightGraph:
    """Gaussian edge weights on a neighbor structure.

    ``scale`` is either a FixedScale(t), giving w_ij = exp(-d_ij^2 / t), or a
    SelfTuning(k_st), giving w_ij = exp(-d_ij^2 / (sigma_i * sigma_j)) with
    sigma_i the distance from i to its k_st-th nearest neighbor. Both forms
    are symmetric by construction; weights below 1e-12 are kept as-is.
    """
    n = neighbors.n
    rows, cols, dists = neighbors.edge_list()
    if isinstance(scale, FixedScale):
        w = np.exp(-(dists**2) / scale.t)
    elif isinstance(scale, SelfTuning):
        if not scale.k_st < n:
            raise ParameterError(
                f"self-tuning neighbor index must be < n, got k_st={scale.k_st}, n={n}"
            )
        sigma = kth_neighbor_distance(neighbors.points, scale.k_st)
        zero = np.flatnonzero(sigma == 0.0)
        if zero.size:
            raise DegenerateScaleError(
                f"self-tuning scale is zero at point {zero[0]}: it coincides with its "
                f"{scale.k_st} nearest neighbor(s); deduplicate points or raise k_st"
            )
        w = np.exp(-(dists**2) / (sigma[rows] * sigma[cols]))
    else:
        raise ParameterError(f"unsupported scale specification: {scale!r}")

    coo = sp.coo_matrix(
        (np.concatenate([w, w]), (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
        shape=(n, n),
    )
    return WeightGraph(weights=coo.tocsr(), neighbor_count=neighbors.neighbor_count)


def sym_normalized_laplacian(graph) -> Laplacian:
    """Symmetric normalized Laplacian L = D^{-1/2} (D - W) D^{-1/2}, dense.

    Accepts a WeightGraph or a raw symmetric weight matrix (dense or sparse).
    Every vertex must have strictly positive degree. The null space is
    spanned by D^{1/2} applied to the indicator of each connected component.
    """
    if isinstance(graph, WeightGraph):
        w = graph.weights.toarray()
        deg = np.asarray(graph.degrees, dtype=np.float64)
    else:
        w = graph.toarray() if sp.issparse(graph) else np.asarray(graph, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ParameterError(f"weight matrix must be square, got shape {w.shape}")
        deg = w.sum(axis=1)
        zero = np.flatnonzero(deg == 0.0)
        if zero.size:
            raise IsolatedVertexError(
                f"vertex {zero[0]} has zero degree; increase the neighbor count k "
                "or the weight scale so every point keeps at least one edge"
            )
    dinv = 1.0 / np.sqrt(deg)
    lap = (np.diag(deg) - w) * dinv[:, None] * dinv[None, :]
    lap = 0.5 * (lap + lap.T)  # kill roundoff asymmetry
    return Laplacian(matrix=lap)
