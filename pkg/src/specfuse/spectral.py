"""Diffusion-geometry operations on top of an eigenbasis.

Everything here works identically on an ordinary eigendecomposition or on a
joint basis from the jade module: diffusion maps through a spectral transfer
kernel, diffusion distances, spectral clustering with k-means, and greedy
farthest point sampling.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ParameterError
from .jade import JointBasis


@dataclass(frozen=True)
class HeatKernel:
    """Low-pass transfer function K(lambda) = exp(-lambda * t), t > 0."""

    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ParameterError(f"heat kernel time must be > 0, got {self.t}")

    def evaluate(self, eigvals: np.ndarray) -> np.ndarray:
        return np.exp(-self.t * np.asarray(eigvals, dtype=np.float64))

    def describe(self) -> str:
        return f"heat(t={self.t:g})"


@dataclass(frozen=True)
class IdentityKernel:
    """K(lambda) = 1: plain eigenvector embedding (Laplacian eigenmap)."""

    def evaluate(self, eigvals: np.ndarray) -> np.ndarray:
        return np.ones_like(np.asarray(eigvals, dtype=np.float64))

    def describe(self) -> str:
        return "identity"


@dataclass(frozen=True)
class CustomKernel:
    """Tabulated transfer function, linearly interpolated between knots."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise ParameterError("custom kernel needs matching 1-d grid/values with >= 2 knots")
        if not (np.diff(g) > 0).all():
            raise ParameterError("custom kernel grid must be strictly increasing")
        if (v < 0).any():
            raise ParameterError("custom kernel values must be nonnegative")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def evaluate(self, eigvals: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(eigvals, dtype=np.float64), self.grid, self.values)

    def describe(self) -> str:
        return f"custom({self.grid.size} knots)"


@dataclass(frozen=True)
class DiffusionEmbedding:
    """Kernel-weighted eigenvector coordinates.

    Column j holds sqrt(K(lambda_j)) * v_j for the eigenpairs actually used,
    so squared Euclidean distances between rows equal the diffusion distance
    sum_l K(lambda_l) (v_il - v_jl)^2. ``eigvals_used`` lists the eigenvalues
    of the retained columns.
    """

    coords: np.ndarray
    kernel: object
    eigvals_used: np.ndarray
    null_discarded: bool = True

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=np.float64)
        if not np.isfinite(c).all():
            raise ParameterError("embedding coordinates contain NaN or Inf")
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return self.coords.shape[0]


@dataclass(frozen=True)
class ClusterResult:
    """K-means output: labels in [0, k), centroids, inertia, and the seed."""

    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    seed: int

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def eig_sym(matrix: np.ndarray):
    """Eigendecomposition of a dense symmetric matrix.

    Returns (eigvals, eigvecs) with eigenvalues ascending and orthonormal
    eigenvector columns; in each column the entry of largest absolute value
    is nonnegative, making the output deterministic.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {m.shape}")
    scale = np.abs(m).max()
    if scale > 0 and np.abs(m - m.T).max() > 1e-10 * scale:
        raise ParameterError("matrix is not symmetric to 1e-10 relative tolerance")
    eigvals, eigvecs = np.linalg.eigh(0.5 * (m + m.T))
    flip = eigvecs[np.argmax(np.abs(eigvecs), axis=0), np.arange(m.shape[0])] < 0
    eigvecs[:, flip] *= -1.0
    return eigvals, eigvecs


def rescale_eigenvalues(eigvals: np.ndarray, top: float = 2.0) -> np.ndarray:
    """Scale an eigenvalue vector so its maximum equals ``top``.

    Useful for applying a transfer kernel tuned to the full [0, 2] spectral
    range of normalized Laplacians to a basis whose spectrum tops out lower.
    """
    ev = np.asarray(eigvals, dtype=np.float64)
    peak = ev.max() if ev.size else 0.0
    if peak <= 0:
        return ev.copy()
    return ev * (top / peak)


def diffusion_map(
    eigvals: np.ndarray,
    eigvecs: np.ndarray,
    kernel,
    k: int,
    discard_null: bool = True,
) -> DiffusionEmbedding:
    """Embed points by kernel-weighted eigenvectors.

    Uses eigenvector columns 2..k when ``discard_null`` (the constant-type
    null vector carries no geometry), columns 1..k otherwise; column j is
    scaled by sqrt(K(lambda_j)).
    """
    ev = np.asarray(eigvals, dtype=np.float64)
    vecs = np.asarray(eigvecs, dtype=np.float64)
    n = vecs.shape[0]
    if ev.ndim != 1 or vecs.ndim != 2 or vecs.shape[1] != ev.size:
        raise ParameterError("eigvals/eigvecs shapes do not match")
    if (np.diff(ev) < 0).any():
        raise ParameterError("eigenvalues must be sorted ascending")
    if k > ev.size or k > n:
        raise ParameterError(f"k={k} exceeds the available {ev.size} eigenpairs")
    if discard_null and k < 2:
        raise ParameterError("k must be >= 2 when the null eigenvector is discarded")
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    cols = slice(1, k) if discard_null else slice(0, k)
    lam = ev[cols]
    gains = kernel.evaluate(lam)
    coords = vecs[:, cols] * np.sqrt(gains)[None, :]
    return DiffusionEmbedding(
        coords=coords, kernel=kernel, eigvals_used=lam, null_discarded=discard_null
    )


def diffusion_distance_matrix(embedding: DiffusionEmbedding) -> np.ndarray:
    """Pairwise Euclidean distances between embedded points.

    The result is a pseudo-metric: symmetric, zero diagonal, triangle
    inequality (it is a distance in the embedding space).
    """
    d = cdist(embedding.coords, embedding.coords)
    np.fill_diagonal(d, 0.0)
    return d


def _sq_dists(points, centers):
    return cdist(points, centers, metric="sqeuclidean")


def _kmeans_pp(points, k, rng):
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    closest = _sq_dists(points, centers[:1]).ravel()
    for j in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = rng.choice(n, p=closest / total)
        else:
            # all remaining mass at chosen centers (duplicates); take the
            # lowest-index point not yet used as a center
            used = {tuple(c) for c in centers[:j]}
            idx = next((i for i in range(n) if tuple(points[i]) not in used), rng.integers(n))
        centers[j] = points[idx]
        closest = np.minimum(closest, _sq_dists(points, centers[j : j + 1]).ravel())
    return centers


def _lloyd(points, centers, max_iter=300):
    k = centers.shape[0]
    prev_labels = None
    centers = centers.copy()
    for _ in range(max_iter):
        d2 = _sq_dists(points, centers)
        labels = d2.argmin(axis=1)
        for c in range(k):
            if not (labels == c).any():
                # empty cluster: re-seed its centroid at the point farthest
                # from it, which claims that point on the spot
                far = int(d2[:, c].argmax())
                labels[far] = c
        if prev_labels is not None and np.array_equal(labels, prev_labels):
            break
        prev_labels = labels
        for c in range(k):
            centers[c] = points[labels == c].mean(axis=0)
    d2 = _sq_dists(points, centers)
    labels = prev_labels if prev_labels is not None else d2.argmin(axis=1)
    inertia = float(d2[np.arange(points.shape[0]), labels].sum())
    return labels, centers, inertia


def kmeans(points: np.ndarray, k: int, seed: int, restarts: int = 10) -> ClusterResult:
    """K-means with k-means++ seeding, best inertia over restarts.

    Lloyd iterations run to an assignment fixpoint or 300 iterations. A
    cluster emptied by an update is re-seeded at the point farthest from its
    centroid rather than failing.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ParameterError("points must be a 2-d array")
    n = pts.shape[0]
    if not 1 <= k <= n:
        raise ParameterError(f"k must satisfy 1 <= k <= n, got k={k}, n={n}")
    if restarts < 1:
        raise ParameterError(f"restarts must be >= 1, got {restarts}")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(restarts):
        init = _kmeans_pp(pts, k, rng)
        labels, centers, inertia = _lloyd(pts, init)
        if best is None or inertia < best[2]:
            best = (labels, centers, inertia)
    labels, centers, inertia = best
    return ClusterResult(labels=labels.astype(np.int64), centroids=centers, inertia=inertia, seed=seed)


def spectral_clustering(basis, k_clusters: int, seed: int, restarts: int = 10) -> ClusterResult:
    """Cluster points by k-means on the lowest-eigenvalue embedding columns.

    ``basis`` is either a JointBasis or an (n, >=k) array of eigenvector
    columns already ordered by ascending eigenvalue. The first ``k_clusters``
    columns (the null space included) are taken and each embedded point is
    normalized to unit length (zero rows are left as-is) before k-means.
    """
    if isinstance(basis, JointBasis):
        vecs = basis.basis
    else:
        vecs = np.asarray(basis, dtype=np.float64)
    if vecs.ndim != 2:
        raise ParameterError("basis must be 2-d")
    if k_clusters > vecs.shape[1]:
        raise ParameterError(
            f"need at least {k_clusters} eigenvector columns, have {vecs.shape[1]}"
        )
    emb = vecs[:, :k_clusters].copy()
    norms = np.linalg.norm(emb, axis=1)
    nonzero = norms > 0
    emb[nonzero] /= norms[nonzero, None]
    return kmeans(emb, k_clusters, seed, restarts=restarts)


def farthest_point_sampling(dist: np.ndarray, start: int, count: int):
    """Greedy max-min sampling on a precomputed distance matrix.

    Returns (indices, radii). radii[j] is the distance from sample j to the
    previously selected set; radii[0] is a sentinel recorded as the matrix
    maximum. The radii sequence is nonincreasing and the first j+1 samples
    form a radii-cover of the whole set. Ties take the lowest index.
    """
    d = np.asarray(dist, dtype=np.float64)
    n = d.shape[0]
    if d.ndim != 2 or d.shape[1] != n:
        raise ParameterError(f"distance matrix must be square, got shape {d.shape}")
    if np.abs(np.diag(d)).max(initial=0.0) != 0.0:
        raise ParameterError("distance matrix must have a zero diagonal")
    if not 0 <= start < n:
        raise ParameterError(f"start index {start} out of range [0, {n})")
    if not 1 <= count <= n:
        raise ParameterError(f"count must satisfy 1 <= count <= n, got {count}")

    chosen = np.empty(count, dtype=np.int64)
    radii = np.empty(count)
    chosen[0] = start
    radii[0] = d.max()
    min_dist = d[start].copy()
    selected = np.zeros(n, dtype=bool)
    selected[start] = True
    for j in range(1, count):
        nxt = int(min_dist.argmax())
        if selected[nxt]:  # all remaining min-distances are zero (duplicates)
            nxt = int(np.flatnonzero(~selected)[0])
        chosen[j] = nxt
        radii[j] = min_dist[nxt]
        selected[nxt] = True
        np.minimum(min_dist, d[nxt], out=min_dist)
    return chosen, radii
