"""Closed-form averaged Laplacians for the multimodal clustering regime.

When only the joint null eigenvectors are needed (spectral clustering), the
joint diagonalization objective restricted to k columns is equivalent to a
single-modality eigenproblem on an "average" of the Laplacians. Three
averages are provided: the sum of squares sum_i L_i^2, the weighted
arithmetic mean sum_i w_i L_i, and the regularized harmonic mean
(sum_i (L_i + alpha I)^{-1})^{-1}.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DataError, ParameterError
from .jade import MatrixSet


@dataclass(frozen=True)
class SquaredSum:
    """Average as sum_i L_i^T L_i = sum_i L_i^2 for symmetric inputs."""


@dataclass(frozen=True)
class Arithmetic:
    """Weighted arithmetic mean sum_i w_i L_i; weights normalized to sum 1."""

    weights: np.ndarray | None = None

    def normalized(self, m: int) -> np.ndarray:
        if self.weights is None:
            return np.full(m, 1.0 / m)
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (m,):
            raise ParameterError(f"weights must have shape ({m},), got {w.shape}")
        if not (w > 0).all():
            raise ParameterError("arithmetic-mean weights must be strictly positive")
        return w / w.sum()


@dataclass(frozen=True)
class Harmonic:
    """Regularized harmonic mean (sum_i (L_i + alpha I)^{-1})^{-1}.

    Laplacians are singular, so alpha > 0 is mandatory; it shifts every
    matrix to strict positive definiteness before inversion.
    """

    alpha: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError(f"harmonic-mean alpha must be > 0, got {self.alpha}")


def _spd_inverse(matrix: np.ndarray, alpha: float) -> np.ndarray:
    try:
        cho = scipy.linalg.cho_factor(matrix, lower=True, check_finite=False)
    except scipy.linalg.LinAlgError as exc:
        raise DataError(
            "matrix is not positive definite after regularization; "
            f"increase alpha (currently {alpha})"
        ) from exc
    return scipy.linalg.cho_solve(cho, np.eye(matrix.shape[0]), check_finite=False)


def average_laplacian(mset: MatrixSet, mode) -> np.ndarray:
    """Combine a set of symmetric PSD matrices into one averaged matrix.

    All modes preserve symmetry and positive semidefiniteness; the output is
    explicitly symmetrized as (M + M^T) / 2 to remove roundoff asymmetry.
    """
    n = mset.n
    if isinstance(mode, SquaredSum):
        out = np.zeros((n, n))
        for a in mset.matrices:
            out += a @ a
    elif isinstance(mode, Arithmetic):
        w = mode.normalized(mset.m)
        out = np.zeros((n, n))
        for wi, a in zip(w, mset.matrices):
            out += wi * a
    elif isinstance(mode, Harmonic):
        if mset.m == 1:
            # (L + alpha I)^{-1} inverted back is exactly L + alpha I
            out = mset.matrices[0] + mode.alpha * np.eye(n)
        else:
            inv_sum = np.zeros((n, n))
            eye = mode.alpha * np.eye(n)
            for a in mset.matrices:
                inv_sum += _spd_inverse(a + eye, mode.alpha)
            out = _spd_inverse(inv_sum, mode.alpha)
    else:
        raise ParameterError(f"unsupported averaging mode: {mode!r}")
    return 0.5 * (out + out.T)


def null_space_clustering_matrix(mset: MatrixSet, mode) -> np.ndarray:
    """Matrix whose k smallest-eigenvalue eigenvectors solve the multimodal
    clustering relaxation.

    For SquaredSum this is exact: sum_i ||L_i V||_F^2 = tr(V^T (sum_i L_i^2) V),
    so minimizing over orthonormal V picks the bottom eigenvectors of the
    squared sum. The other modes are drop-in averaging alternatives.
    """
    return average_laplacian(mset, mode)
