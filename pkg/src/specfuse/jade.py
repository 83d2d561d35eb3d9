"""Joint approximate diagonalization of real symmetric matrices.

A single orthogonal basis is sought that makes every matrix of a set as
diagonal as possible, by cyclic sweeps of closed-form plane (Jacobi)
rotations that jointly reduce the summed squared off-diagonal energy of all
matrices at once. With a single input matrix this reduces to the classical
Jacobi eigenvalue iteration.

The per-column averages of the rotated diagonals act as joint approximate
eigenvalues, so the basis can stand in for an ordinary eigendecomposition in
spectral embeddings, diffusion distances, and clustering.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


@dataclass(frozen=True)
class MatrixSet:
    """A stack of m dense symmetric n x n matrices to diagonalize together.

    Parameters
    ----------
    matrices : sequence of (n, n) ndarray
        Real symmetric matrices, all of the same size. Symmetry is required
        to 1e-12 relative tolerance.
    """

    matrices: tuple

    def __post_init__(self):
        if len(self.matrices) < 1:
            raise ParameterError("need at least one matrix")
        stack = []
        n = None
        for idx, m in enumerate(self.matrices):
            a = np.array(m, dtype=np.float64)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ParameterError(f"matrix {idx} is not square: shape {a.shape}")
            if n is None:
                n = a.shape[0]
            elif a.shape[0] != n:
                raise ParameterError(
                    f"matrix {idx} has size {a.shape[0]}, expected {n}"
                )
            scale = np.abs(a).max()
            if scale > 0 and np.abs(a - a.T).max() > 1e-12 * scale:
                raise ParameterError(f"matrix {idx} is not symmetric to 1e-12 relative tolerance")
            a.setflags(write=False)
            stack.append(a)
        object.__setattr__(self, "matrices", tuple(stack))

    @property
    def m(self) -> int:
        return len(self.matrices)

    @property
    def n(self) -> int:
        return self.matrices[0].shape[0]

    def stack(self) -> np.ndarray:
        """Writable (m, n, n) copy of the matrices."""
        return np.stack(self.matrices).astype(np.float64, copy=True)


@dataclass(frozen=True)
class JadeOptions:
    """Termination controls for the joint diagonalization sweeps.

    Parameters
    ----------
    max_sweeps : int
        Hard cap on full cyclic sweeps over all index pairs.
    rel_tol : float
        Stop when a full sweep decreases the total off-diagonal energy by
        less than rel_tol times the summed squared Frobenius norms.
    rotation_threshold : float
        Skip individual rotations whose sine falls below this value.
    """

    max_sweeps: int = 100
    rel_tol: float = 1e-12
    rotation_threshold: float = 1e-14

    def __post_init__(self):
        if self.max_sweeps <= 0:
            raise ParameterError(f"max_sweeps must be positive, got {self.max_sweeps}")
        if not self.rel_tol > 0:
            raise ParameterError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.rotation_threshold > 0:
            raise ParameterError(
                f"rotation_threshold must be positive, got {self.rotation_threshold}"
            )


@dataclass(frozen=True)
class JointBasis:
    """Result of a joint diagonalization.

    Attributes
    ----------
    basis : (n, n) ndarray
        Orthogonal matrix; columns are the joint eigenvectors, ordered by
        ascending joint eigenvalue. In each column the entry of largest
        absolute value is nonnegative.
    per_modality_eigs : (m, n) ndarray
        diag(V^T L_i V) for each input matrix, columns matching ``basis``.
    joint_eigs : (n,) ndarray
        Columnwise mean of ``per_modality_eigs``, sorted ascending.
    residual : float
        Total remaining off-diagonal energy, sum_i off(V^T L_i V).
    sweeps_used : int
        Number of full sweeps performed.
    """

    basis: np.ndarray
    per_modality_eigs: np.ndarray
    joint_eigs: np.ndarray
    residual: float
    sweeps_used: int


def off_norm(matrix: np.ndarray) -> float:
    """Sum of squared off-diagonal entries of a square matrix."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ParameterError(f"off_norm needs a square matrix, got shape {m.shape}")
    off = m.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.sum(off * off))


def _rotation_from_moments(g11: float, g12: float, g22: float):
    """Optimal (c, s) from the 2x2 moment matrix G = sum_i h_i h_i^T.

    With (x, y) the top unit eigenvector of G normalized to x >= 0, the
    rotation aligning the h vectors with the first axis (which minimizes the
    joint off-diagonal energy for the r_pq = s, r_qp = -s convention) is
    c = sqrt((x + 1) / 2), s = -y / (2 c). At x == 0 both sine signs reach
    the same objective; the positive one is chosen for determinism.
    """
    ton = g11 - g22
    toff = 2.0 * g12
    r = math.hypot(ton, toff)
    if r == 0.0:
        return 1.0, 0.0
    if ton >= 0.0:
        x, y = ton + r, toff
    else:
        x, y = toff, r - ton
    if x < 0.0:
        x, y = -x, -y
    norm = math.hypot(x, y)
    x /= norm
    y /= norm
    c = math.sqrt((x + 1.0) / 2.0)
    s = -y / (2.0 * c)
    if x == 0.0:
        s = abs(s)
    return c, s


def rotation_for_pair(mset: MatrixSet, p: int, q: int, weights=None):
    """Closed-form plane rotation minimizing the joint off-diagonal energy.

    For the index pair (p, q) the rotation acts on rows/columns p and q with
    entries [[c, s], [-s, c]]. Each matrix contributes the vector
    h_i = (a_pp - a_qq, 2 a_pq); the optimal angle comes from the top
    eigenvector of G = sum_i h_i h_i^T.

    Parameters
    ----------
    mset : MatrixSet
        Current (possibly already partially rotated) matrices.
    p, q : int
        Pair indices, p < q.
    weights : (m,) array_like, optional
        Positive per-matrix weights; default all ones.

    Returns
    -------
    (c, s) : tuple of float
        Cosine and sine with c^2 + s^2 = 1.
    """
    n = mset.n
    if not (0 <= p < q < n):
        raise ParameterError(f"need 0 <= p < q < n, got p={p}, q={q}, n={n}")
    w = _check_weights(weights, mset.m)
    g11 = g12 = g22 = 0.0
    for wi, a in zip(w, mset.matrices):
        h1 = a[p, p] - a[q, q]
        h2 = a[p, q] + a[q, p]
        g11 += wi * h1 * h1
        g12 += wi * h1 * h2
        g22 += wi * h2 * h2
    return _rotation_from_moments(g11, g12, g22)


@njit(cache=True)
def _sweep_numba(A, V, weights, rotation_threshold):  # pragma: no cover - jit
    m, n, _ = A.shape
    rotations = 0
    for p in range(n - 1):
        for q in range(p + 1, n):
            g11 = 0.0
            g12 = 0.0
            g22 = 0.0
            for i in range(m):
                h1 = A[i, p, p] - A[i, q, q]
                h2 = A[i, p, q] + A[i, q, p]
                g11 += weights[i] * h1 * h1
                g12 += weights[i] * h1 * h2
                g22 += weights[i] * h2 * h2
            ton = g11 - g22
            toff = 2.0 * g12
            r = math.hypot(ton, toff)
            if r == 0.0:
                continue
            if ton >= 0.0:
                x = ton + r
                y = toff
            else:
                x = toff
                y = r - ton
            if x < 0.0:
                x = -x
                y = -y
            norm = math.hypot(x, y)
            x /= norm
            y /= norm
            c = math.sqrt((x + 1.0) / 2.0)
            s = -y / (2.0 * c)
            if x == 0.0:
                s = abs(s)
            if abs(s) < rotation_threshold:
                continue
            for i in range(m):
                for j in range(n):
                    ap = A[i, p, j]
                    aq = A[i, q, j]
                    A[i, p, j] = c * ap - s * aq
                    A[i, q, j] = s * ap + c * aq
                for j in range(n):
                    ap = A[i, j, p]
                    aq = A[i, j, q]
                    A[i, j, p] = c * ap - s * aq
                    A[i, j, q] = s * ap + c * aq
            for j in range(n):
                vp = V[j, p]
                vq = V[j, q]
                V[j, p] = c * vp - s * vq
                V[j, q] = s * vp + c * vq
            rotations += 1
    return rotations


def _sweep_numpy(A, V, weights, rotation_threshold):
    m, n, _ = A.shape
    rotations = 0
    for p in range(n - 1):
        for q in range(p + 1, n):
            h1 = A[:, p, p] - A[:, q, q]
            h2 = A[:, p, q] + A[:, q, p]
            g11 = float(np.sum(weights * h1 * h1))
            g12 = float(np.sum(weights * h1 * h2))
            g22 = float(np.sum(weights * h2 * h2))
            c, s = _rotation_from_moments(g11, g12, g22)
            if abs(s) < rotation_threshold:
                continue
            ap = A[:, p, :].copy()
            aq = A[:, q, :].copy()
            A[:, p, :] = c * ap - s * aq
            A[:, q, :] = s * ap + c * aq
            ap = A[:, :, p].copy()
            aq = A[:, :, q].copy()
            A[:, :, p] = c * ap - s * aq
            A[:, :, q] = s * ap + c * aq
            vp = V[:, p].copy()
            vq = V[:, q].copy()
            V[:, p] = c * vp - s * vq
            V[:, q] = s * vp + c * vq
            rotations += 1
    return rotations


def _check_weights(weights, m):
    if weights is None:
        return np.ones(m)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (m,):
        raise ParameterError(f"weights must have shape ({m},), got {w.shape}")
    if not (w > 0).all():
        raise ParameterError("weights must be strictly positive")
    return w


def _total_off(stack, weights):
    off = stack.copy()
    idx = np.arange(stack.shape[1])
    off[:, idx, idx] = 0.0
    return float(np.sum(weights * np.sum(off * off, axis=(1, 2))))


def jade(mset: MatrixSet, opts: JadeOptions | None = None, weights=None) -> JointBasis:
    """Jointly diagonalize a set of real symmetric matrices.

    Cyclic sweeps over all pairs (p, q), p < q, in row-major order apply the
    closed-form rotation of :func:`rotation_for_pair`; each accepted rotation
    cannot increase the total off-diagonal energy. Sweeping stops when a full
    sweep reduces that energy by less than ``rel_tol`` times the summed
    squared Frobenius norms, or after ``max_sweeps`` sweeps (reaching the cap
    is not an error; the residual is reported either way).

    Parameters
    ----------
    mset : MatrixSet
        Matrices to diagonalize.
    opts : JadeOptions, optional
        Termination controls.
    weights : (m,) array_like, optional
        Positive per-matrix weights on the objective; default all ones. The
        reported eigenvalues and residual are always unweighted.

    Returns
    -------
    JointBasis
        Deterministic for fixed inputs and options: fixed sweep order,
        ascending joint eigenvalues with a stable tie-break, and a fixed
        column sign convention.
    """
    opts = opts or JadeOptions()
    w = _check_weights(weights, mset.m)
    A = mset.stack()
    n = mset.n
    V = np.eye(n)

    scale = float(np.sum(w * np.sum(A * A, axis=(1, 2))))
    prev_off = _total_off(A, w)
    sweep = _sweep_numba if _HAVE_NUMBA else _sweep_numpy

    sweeps_used = 0
    while sweeps_used < opts.max_sweeps:
        sweep(A, V, w, opts.rotation_threshold)
        sweeps_used += 1
        curr_off = _total_off(A, w)
        if prev_off - curr_off <= opts.rel_tol * scale:
            break
        prev_off = curr_off

    per_modality, joint, residual = joint_eigendecomposition_report(mset, V)
    order = np.argsort(joint, kind="stable")
    V = V[:, order]
    per_modality = per_modality[:, order]
    joint = joint[order]
    flip = V[np.argmax(np.abs(V), axis=0), np.arange(n)] < 0
    V[:, flip] *= -1.0

    return JointBasis(
        basis=V,
        per_modality_eigs=per_modality,
        joint_eigs=joint,
        residual=residual,
        sweeps_used=sweeps_used,
    )


def joint_eigendecomposition_report(mset: MatrixSet, basis: np.ndarray):
    """Evaluate a candidate joint basis against a matrix set.

    Parameters
    ----------
    mset : MatrixSet
    basis : (n, n) ndarray
        Orthogonal within 1e-8 in Frobenius norm.

    Returns
    -------
    per_modality_eigs : (m, n) ndarray
        diag(basis^T L_i basis) per matrix.
    joint_eigs : (n,) ndarray
        Columnwise mean of the per-matrix diagonals.
    residual : float
        sum_i off(basis^T L_i basis).
    """
    v = np.asarray(basis, dtype=np.float64)
    n = mset.n
    if v.shape != (n, n):
        raise ParameterError(f"basis must have shape ({n}, {n}), got {v.shape}")
    gram_err = np.linalg.norm(v.T @ v - np.eye(n))
    if gram_err > 1e-8:
        raise ParameterError(f"basis is not orthogonal: ||V^T V - I||_F = {gram_err:.3e}")
    per_modality = np.empty((mset.m, n))
    residual = 0.0
    for i, a in enumerate(mset.matrices):
        rotated = v.T @ a @ v
        per_modality[i] = np.diag(rotated)
        residual += off_norm(rotated)
    joint = per_modality.mean(axis=0)
    return per_modality, joint, residual
