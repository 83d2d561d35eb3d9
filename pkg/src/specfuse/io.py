"""CSV / Matrix Market / metadata persistence.

Conventions: every CSV uses comma separators, '.' decimals, and a header
row; metadata sidecars are plain "key = value" lines. Floats are written
with repr-level precision so artifacts round-trip exactly and identical runs
produce byte-identical files.
"""

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import ParameterError
from .graph import PointCloud, WeightGraph

_FLOAT_FMT = "%.17g"


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return _FLOAT_FMT % value
    return str(value)


def save_point_cloud(path, cloud: PointCloud, include_labels: bool = True) -> None:
    """Write a point cloud CSV: feature columns, optional final `label`."""
    header = [f"f{j}" for j in range(cloud.dim)]
    columns = [cloud.points]
    fmt = [_FLOAT_FMT] * cloud.dim
    if include_labels and cloud.labels is not None:
        header.append("label")
        columns.append(cloud.labels[:, None].astype(np.float64))
        fmt.append("%d")
    data = np.hstack(columns)
    np.savetxt(path, data, fmt=fmt, delimiter=",", header=",".join(header), comments="")


def load_point_cloud(path, modality_name: str = "") -> PointCloud:
    """Read a point cloud CSV; a final `label` column becomes the labels."""
    with open(path) as fh:
        header = fh.readline().strip()
        if not header:
            raise ParameterError(f"{path}: missing header row")
        names = [c.strip() for c in header.split(",")]
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ParameterError(f"{path}: non-numeric data ({exc})") from exc
    if data.shape[1] != len(names):
        raise ParameterError(
            f"{path}: header names {len(names)} columns, data has {data.shape[1]}"
        )
    labels = None
    if names[-1].lower() == "label":
        labels = data[:, -1].astype(np.int64)
        data = data[:, :-1]
    if data.shape[1] == 0:
        raise ParameterError(f"{path}: no feature columns")
    return PointCloud(points=data, labels=labels, modality_name=modality_name or str(path))


def save_labels(path, labels) -> None:
    arr = np.asarray(labels).astype(np.int64)
    np.savetxt(path, arr[:, None], fmt="%d", delimiter=",", header="label", comments="")


def load_labels(path) -> np.ndarray:
    with open(path) as fh:
        fh.readline()
        data = np.loadtxt(fh, delimiter=",", ndmin=1)
    return np.asarray(data).reshape(-1).astype(np.int64)


def save_matrix_csv(path, matrix, header=None) -> None:
    """Write a dense matrix CSV; default header is c0,c1,..."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ParameterError(f"expected a 2-d matrix, got shape {m.shape}")
    if header is None:
        header = [f"c{j}" for j in range(m.shape[1])]
    if len(header) != m.shape[1]:
        raise ParameterError("header length does not match the column count")
    np.savetxt(
        path, m, fmt=_FLOAT_FMT, delimiter=",", header=",".join(header), comments=""
    )


def load_matrix_csv(path):
    """Read a dense matrix CSV written by save_matrix_csv; returns (matrix, header)."""
    with open(path) as fh:
        header = [c.strip() for c in fh.readline().strip().split(",")]
        try:
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise ParameterError(f"{path}: non-numeric data ({exc})") from exc
    return data, header


def save_basis_csv(path, basis, eigvals) -> None:
    """Write eigenvector columns with the eigenvalue of each column as header."""
    save_matrix_csv(path, basis, header=[_FLOAT_FMT % ev for ev in np.asarray(eigvals)])


def save_metadata(path, entries: dict) -> None:
    with open(path, "w") as fh:
        for key, value in entries.items():
            fh.write(f"{key} = {_fmt(value)}\n")


def load_metadata(path) -> dict:
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParameterError(f"{path}: malformed metadata line {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def save_weight_graph_mm(path, graph: WeightGraph) -> None:
    """Export the affinity matrix in symmetric real Matrix Market format."""
    scipy.io.mmwrite(
        str(path), graph.weights.tocoo(), field="real", symmetry="symmetric"
    )


def load_weight_graph_mm(path, neighbor_count: int = 0) -> WeightGraph:
    mat = scipy.io.mmread(str(path))
    return WeightGraph(weights=sp.csr_matrix(mat), neighbor_count=neighbor_count)
