"""Command-line pipeline driver.

Subcommands: generate, pipeline, fps, roc, accuracy. The pipeline composes
graph construction, joint diagonalization (or closed-form averaging),
diffusion embedding/distances, clustering, and evaluation, writing one
artifact file per stage so runs can be diffed and plotted externally.

Exit codes: 0 success, 2 usage/config error, 3 data/numeric error.

Every pipeline option can also come from a config file of "key = value"
lines (same key names as the flags, underscores instead of dashes); an
explicit flag overrides the file.
"""

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .averaging import Arithmetic, Harmonic, SquaredSum, average_laplacian
from .errors import DataError, ParameterError, SpecfuseError
from .evaluation import clustering_accuracy, roc_from_distances
from .graph import FixedScale, SelfTuning, gaussian_weights, knn_graph, sym_normalized_laplacian
from .jade import JadeOptions, MatrixSet, jade
from .spectral import (
    HeatKernel,
    IdentityKernel,
    diffusion_distance_matrix,
    diffusion_map,
    eig_sym,
    farthest_point_sampling,
    rescale_eigenvalues,
    spectral_clustering,
)
from .synth import blobs, circles, swiss_roll_pair

_PIPELINE_DEFAULTS = {
    "modality": None,
    "labels": None,
    "dataset": None,
    "n": None,
    "seed": 0,
    "blob_clusters": 6,
    "blob_sigma": (0.8, 0.8),
    "roll_noise": 0.0,
    "knn_k": 10,
    "scale": "self-tuning",
    "scale_t": 1.0,
    "scale_kst": 7,
    "diag_method": "jade",
    "jade_max_sweeps": 100,
    "jade_rel_tol": 1e-12,
    "jade_rotation_threshold": 1e-14,
    "averaging_mode": "harmonic",
    "averaging_alpha": 1.0,
    "averaging_weights": None,
    "n_eigvecs": 100,
    "kernel": "heat",
    "kernel_t": 5.0,
    "rescale_spectrum": False,
    "n_clusters": None,
    "kmeans_seed": 0,
    "kmeans_restarts": 10,
    "output_dir": None,
}


def _parse_bool(text):
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ParameterError(f"expected a boolean, got {text!r}")


def _parse_float_list(text):
    return tuple(float(part) for part in str(text).split(",") if part.strip())


def _parse_str_list(text):
    return [part.strip() for part in str(text).split(",") if part.strip()]


_CONFIG_PARSERS = {
    "modality": _parse_str_list,
    "labels": str,
    "dataset": str,
    "n": int,
    "seed": int,
    "blob_clusters": int,
    "blob_sigma": _parse_float_list,
    "roll_noise": float,
    "knn_k": int,
    "scale": str,
    "scale_t": float,
    "scale_kst": int,
    "diag_method": str,
    "jade_max_sweeps": int,
    "jade_rel_tol": float,
    "jade_rotation_threshold": float,
    "averaging_mode": str,
    "averaging_alpha": float,
    "averaging_weights": _parse_float_list,
    "n_eigvecs": int,
    "kernel": str,
    "kernel_t": float,
    "rescale_spectrum": _parse_bool,
    "n_clusters": int,
    "kmeans_seed": int,
    "kmeans_restarts": int,
    "output_dir": str,
}


@dataclass
class ExperimentConfig:
    """Resolved settings of one pipeline run (defaults < config file < flags)."""

    modality: list | None
    labels: str | None
    dataset: str | None
    n: int | None
    seed: int
    blob_clusters: int
    blob_sigma: tuple
    roll_noise: float
    knn_k: int
    scale: str
    scale_t: float
    scale_kst: int
    diag_method: str
    jade_max_sweeps: int
    jade_rel_tol: float
    jade_rotation_threshold: float
    averaging_mode: str
    averaging_alpha: float
    averaging_weights: tuple | None
    n_eigvecs: int
    kernel: str
    kernel_t: float
    rescale_spectrum: bool
    n_clusters: int | None
    kmeans_seed: int
    kmeans_restarts: int
    output_dir: str | None

    def __post_init__(self):
        has_files = bool(self.modality)
        has_generator = self.dataset is not None
        if has_files == has_generator:
            raise ParameterError(
                "exactly one of --modality files or a --dataset generator is required"
            )
        if self.scale not in ("fixed", "self-tuning"):
            raise ParameterError(f"scale must be 'fixed' or 'self-tuning', got {self.scale!r}")
        if self.diag_method not in ("jade", "averaging"):
            raise ParameterError(
                f"diag_method must be 'jade' or 'averaging', got {self.diag_method!r}"
            )
        if self.averaging_mode not in ("squared_sum", "arithmetic", "harmonic"):
            raise ParameterError(f"unknown averaging_mode {self.averaging_mode!r}")
        if self.kernel not in ("heat", "identity"):
            raise ParameterError(f"kernel must be 'heat' or 'identity', got {self.kernel!r}")
        if self.knn_k < 1:
            raise ParameterError(f"knn_k must be >= 1, got {self.knn_k}")
        if self.n_eigvecs < 2:
            raise ParameterError(f"n_eigvecs must be >= 2, got {self.n_eigvecs}")
        if self.output_dir is None:
            raise ParameterError("--output-dir is required")

    def scale_spec(self):
        return FixedScale(self.scale_t) if self.scale == "fixed" else SelfTuning(self.scale_kst)

    def averaging_spec(self):
        if self.averaging_mode == "squared_sum":
            return SquaredSum()
        if self.averaging_mode == "arithmetic":
            return Arithmetic(
                None if self.averaging_weights is None else np.asarray(self.averaging_weights)
            )
        return Harmonic(self.averaging_alpha)

    def kernel_spec(self):
        return HeatKernel(self.kernel_t) if self.kernel == "heat" else IdentityKernel()

    def jade_options(self):
        return JadeOptions(
            max_sweeps=self.jade_max_sweeps,
            rel_tol=self.jade_rel_tol,
            rotation_threshold=self.jade_rotation_threshold,
        )


def load_config_file(path) -> dict:
    """Parse a flat "key = value" config file into typed values."""
    raw = io.load_metadata(path)
    values = {}
    for key, text in raw.items():
        if key not in _CONFIG_PARSERS:
            raise ParameterError(f"{path}: unknown config key {key!r}")
        try:
            values[key] = _CONFIG_PARSERS[key](text)
        except (TypeError, ValueError) as exc:
            raise ParameterError(f"{path}: bad value for {key}: {text!r} ({exc})") from exc
    return values


def resolve_config(cli_values: dict, config_path=None) -> ExperimentConfig:
    merged = dict(_PIPELINE_DEFAULTS)
    if config_path is not None:
        merged.update(load_config_file(config_path))
    merged.update({k: v for k, v in cli_values.items() if v is not None})
    return ExperimentConfig(**merged)


def _generate_dataset(cfg: ExperimentConfig):
    if cfg.dataset == "circles":
        return circles(n=cfg.n if cfg.n is not None else 400, seed=cfg.seed)
    if cfg.dataset == "blobs":
        total = cfg.n if cfg.n is not None else 40 * cfg.blob_clusters
        if total % cfg.blob_clusters != 0:
            raise ParameterError(
                f"n={total} must be divisible by the {cfg.blob_clusters} blob clusters"
            )
        return blobs(
            n_per_cluster=total // cfg.blob_clusters,
            n_clusters=cfg.blob_clusters,
            sigma_per_modality=cfg.blob_sigma,
            seed=cfg.seed,
        )
    if cfg.dataset == "swiss_roll":
        return swiss_roll_pair(
            n=cfg.n if cfg.n is not None else 800, noise_sigma=cfg.roll_noise, seed=cfg.seed
        )
    raise ParameterError(
        f"unknown dataset {cfg.dataset!r}; choose circles, blobs, or swiss_roll"
    )


def _write_dataset(out: Path, dataset, cfg: ExperimentConfig):
    for idx, cloud in enumerate(dataset.modalities, start=1):
        io.save_point_cloud(out / f"modality_{idx}.csv", cloud, include_labels=False)
    if dataset.labels is not None:
        io.save_labels(out / "labels.csv", dataset.labels)
    if dataset.intrinsic_param is not None:
        io.save_matrix_csv(
            out / "intrinsic.csv", dataset.intrinsic_param[:, None], header=["intrinsic"]
        )
    io.save_metadata(
        out / "dataset.meta",
        {"dataset": cfg.dataset, "n": dataset.n, "seed": dataset.seed,
         "modalities": len(dataset.modalities)},
    )


def _ensure_output_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise ParameterError(f"output dir {out} is not writable: {exc}") from exc
    return out


def _load_modalities(cfg: ExperimentConfig):
    clouds = [io.load_point_cloud(p, modality_name=p) for p in cfg.modality]
    counts = {c.n for c in clouds}
    if len(counts) != 1:
        raise ParameterError(
            f"modality CSVs disagree on the row count: {sorted(c.n for c in clouds)}"
        )
    truth = None
    for cloud in clouds:
        if cloud.labels is not None:
            if truth is not None and not np.array_equal(truth, cloud.labels):
                raise ParameterError("modality CSVs carry conflicting label columns")
            truth = cloud.labels
    if cfg.labels is not None:
        truth = io.load_labels(cfg.labels)
        if truth.size != clouds[0].n:
            raise ParameterError(
                f"labels file has {truth.size} rows, modalities have {clouds[0].n}"
            )
    return clouds, truth


def run_generate(cfg: ExperimentConfig) -> int:
    if cfg.dataset is None:
        raise ParameterError("generate requires --dataset")
    out = _ensure_output_dir(cfg)
    dataset = _generate_dataset(cfg)
    _write_dataset(out, dataset, cfg)
    print(
        f"generate: dataset={cfg.dataset} n={dataset.n} seed={dataset.seed} "
        f"modalities={len(dataset.modalities)} -> {out}"
    )
    return 0


def run_pipeline(cfg: ExperimentConfig) -> int:
    out = _ensure_output_dir(cfg)

    if cfg.dataset is not None:
        dataset = _generate_dataset(cfg)
        _write_dataset(out, dataset, cfg)
        clouds = list(dataset.modalities)
        truth = dataset.labels
    else:
        clouds, truth = _load_modalities(cfg)

    n = clouds[0].n
    n_clusters = cfg.n_clusters
    if n_clusters is None:
        if truth is None:
            raise ParameterError("--n-clusters is required when no labels are available")
        n_clusters = int(np.unique(truth).size)
    if not 1 <= n_clusters <= n:
        raise ParameterError(f"n_clusters must satisfy 1 <= k <= n, got {n_clusters}, n={n}")

    scale = cfg.scale_spec()
    laplacians = []
    lap_meta = {"n": n, "modalities": len(clouds), "knn_k": cfg.knn_k, "scale": cfg.scale}
    if cfg.scale == "fixed":
        lap_meta["scale_t"] = cfg.scale_t
    else:
        lap_meta["scale_kst"] = cfg.scale_kst
    for idx, cloud in enumerate(clouds, start=1):
        neighbors = knn_graph(cloud, cfg.knn_k)
        graph = gaussian_weights(neighbors, scale)
        io.save_weight_graph_mm(out / f"modality_{idx}_graph.mtx", graph)
        lap = sym_normalized_laplacian(graph)
        laplacians.append(lap.matrix)
        lap_meta[f"modality_{idx}_degree_min"] = float(graph.degrees.min())
        lap_meta[f"modality_{idx}_degree_max"] = float(graph.degrees.max())
    io.save_metadata(out / "laplacians.meta", lap_meta)

    mset = MatrixSet(tuple(laplacians))
    basis_meta = {"method": cfg.diag_method, "n": n}
    if cfg.diag_method == "jade":
        joint = jade(mset, cfg.jade_options())
        eigvals, eigvecs = joint.joint_eigs, joint.basis
        basis_meta["residual"] = joint.residual
        basis_meta["sweeps_used"] = joint.sweeps_used
        summary_mid = f"residual={joint.residual:.6e} sweeps={joint.sweeps_used}"
    else:
        averaged = average_laplacian(mset, cfg.averaging_spec())
        eigvals, eigvecs = eig_sym(averaged)
        basis_meta["averaging_mode"] = cfg.averaging_mode
        if cfg.averaging_mode == "harmonic":
            basis_meta["alpha"] = cfg.averaging_alpha
        summary_mid = f"averaging_mode={cfg.averaging_mode}"
    io.save_basis_csv(out / "basis.csv", eigvecs, eigvals)
    io.save_metadata(out / "basis.meta", basis_meta)

    k_eff = min(cfg.n_eigvecs, n)
    kernel_eigvals = rescale_eigenvalues(eigvals) if cfg.rescale_spectrum else eigvals
    embedding = diffusion_map(kernel_eigvals, eigvecs, cfg.kernel_spec(), k_eff)
    io.save_matrix_csv(out / "embedding.csv", embedding.coords)
    distances = diffusion_distance_matrix(embedding)
    io.save_matrix_csv(out / "distances.csv", distances)

    clusters = spectral_clustering(eigvecs, n_clusters, cfg.kmeans_seed, cfg.kmeans_restarts)
    io.save_labels(out / "cluster_labels.csv", clusters.labels)
    io.save_metadata(
        out / "cluster.meta",
        {"seed": clusters.seed, "inertia": clusters.inertia,
         "restarts": cfg.kmeans_restarts, "n_clusters": n_clusters},
    )

    accuracy_text = "accuracy=n/a"
    if truth is not None:
        acc = clustering_accuracy(clusters.labels, truth)
        io.save_metadata(out / "accuracy.meta", {"accuracy_percent": acc})
        roc = roc_from_distances(distances, truth)
        io.save_matrix_csv(
            out / "roc.csv",
            np.column_stack([roc.thresholds, roc.fpr, roc.tpr]),
            header=["threshold", "fpr", "tpr"],
        )
        io.save_metadata(out / "roc.meta", {"auc": roc.auc})
        accuracy_text = f"accuracy={acc:.1f}%"

    print(f"pipeline: method={cfg.diag_method} {summary_mid} {accuracy_text} -> {out}")
    return 0


def run_fps(distances_path, start, count, output_dir) -> int:
    dist, _ = io.load_matrix_csv(distances_path)
    if dist.shape[0] != dist.shape[1]:
        raise ParameterError(
            f"distance CSV must be square, got shape {dist.shape[0]}x{dist.shape[1]}"
        )
    indices, radii = farthest_point_sampling(dist, start, count)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.save_matrix_csv(
        out / "fps.csv",
        np.column_stack([indices.astype(np.float64), radii]),
        header=["index", "radius"],
    )
    print(f"fps: count={count} start={start} indices={','.join(map(str, indices))}")
    return 0


def run_roc(distances_path, labels_path, output_dir) -> int:
    dist, _ = io.load_matrix_csv(distances_path)
    truth = io.load_labels(labels_path)
    roc = roc_from_distances(dist, truth)
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.save_matrix_csv(
        out / "roc.csv",
        np.column_stack([roc.thresholds, roc.fpr, roc.tpr]),
        header=["threshold", "fpr", "tpr"],
    )
    io.save_metadata(out / "roc.meta", {"auc": roc.auc})
    print(f"roc: auc={roc.auc:.4f} -> {out}")
    return 0


def run_accuracy(labels_path, truth_path, output_dir=None) -> int:
    pred = io.load_labels(labels_path)
    truth = io.load_labels(truth_path)
    acc = clustering_accuracy(pred, truth)
    if output_dir is not None:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        io.save_metadata(out / "accuracy.meta", {"accuracy_percent": acc})
    print(f"accuracy = {acc:.2f}%")
    return 0


def _add_pipeline_options(parser, include_pipeline_stages=True):
    parser.add_argument("--config", help="key = value config file; flags override it")
    parser.add_argument("--modality", action="append", help="modality CSV (repeatable)")
    parser.add_argument("--labels", help="ground-truth labels CSV")
    parser.add_argument("--dataset", choices=["circles", "blobs", "swiss_roll"])
    parser.add_argument("--n", type=int, help="generated sample count")
    parser.add_argument("--seed", type=int, help="generator seed")
    parser.add_argument("--blob-clusters", type=int, dest="blob_clusters")
    parser.add_argument("--blob-sigma", type=_parse_float_list, dest="blob_sigma")
    parser.add_argument("--roll-noise", type=float, dest="roll_noise")
    parser.add_argument("--output-dir", dest="output_dir")
    if not include_pipeline_stages:
        return
    parser.add_argument("--knn-k", type=int, dest="knn_k")
    parser.add_argument("--scale", choices=["fixed", "self-tuning"])
    parser.add_argument("--scale-t", type=float, dest="scale_t")
    parser.add_argument("--scale-kst", type=int, dest="scale_kst")
    parser.add_argument("--diag-method", choices=["jade", "averaging"], dest="diag_method")
    parser.add_argument("--jade-max-sweeps", type=int, dest="jade_max_sweeps")
    parser.add_argument("--jade-rel-tol", type=float, dest="jade_rel_tol")
    parser.add_argument(
        "--jade-rotation-threshold", type=float, dest="jade_rotation_threshold"
    )
    parser.add_argument(
        "--averaging-mode",
        choices=["squared_sum", "arithmetic", "harmonic"],
        dest="averaging_mode",
    )
    parser.add_argument("--averaging-alpha", type=float, dest="averaging_alpha")
    parser.add_argument("--averaging-weights", type=_parse_float_list, dest="averaging_weights")
    parser.add_argument("--n-eigvecs", type=int, dest="n_eigvecs")
    parser.add_argument("--kernel", choices=["heat", "identity"])
    parser.add_argument("--kernel-t", type=float, dest="kernel_t")
    parser.add_argument(
        "--rescale-spectrum",
        action="store_const",
        const=True,
        dest="rescale_spectrum",
        help="stretch eigenvalues to the full [0, 2] range before the kernel",
    )
    parser.add_argument("--n-clusters", type=int, dest="n_clusters")
    parser.add_argument("--kmeans-seed", type=int, dest="kmeans_seed")
    parser.add_argument("--kmeans-restarts", type=int, dest="kmeans_restarts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specfuse",
        description="Multimodal diffusion geometry pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic multimodal dataset")
    _add_pipeline_options(gen, include_pipeline_stages=False)

    pipe = sub.add_parser("pipeline", help="run the full pipeline, one artifact per stage")
    _add_pipeline_options(pipe)

    fps = sub.add_parser("fps", help="farthest point sampling on a distance CSV")
    fps.add_argument("--distances", required=True)
    fps.add_argument("--start", type=int, default=0)
    fps.add_argument("--count", type=int, required=True)
    fps.add_argument("--output-dir", dest="output_dir", required=True)

    roc = sub.add_parser("roc", help="ROC/AUC from a distance CSV and labels")
    roc.add_argument("--distances", required=True)
    roc.add_argument("--labels", required=True)
    roc.add_argument("--output-dir", dest="output_dir", required=True)

    acc = sub.add_parser("accuracy", help="clustering accuracy of labels vs truth")
    acc.add_argument("--labels", required=True)
    acc.add_argument("--truth", required=True)
    acc.add_argument("--output-dir", dest="output_dir")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command in ("generate", "pipeline"):
            cli_values = {
                key: getattr(args, key) for key in _PIPELINE_DEFAULTS if hasattr(args, key)
            }
            cfg = resolve_config(cli_values, config_path=args.config)
            return run_generate(cfg) if args.command == "generate" else run_pipeline(cfg)
        if args.command == "fps":
            return run_fps(args.distances, args.start, args.count, args.output_dir)
        if args.command == "roc":
            return run_roc(args.distances, args.labels, args.output_dir)
        if args.command == "accuracy":
            return run_accuracy(args.labels, args.truth, args.output_dir)
        parser.error(f"unknown command {args.command!r}")
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except SpecfuseError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
