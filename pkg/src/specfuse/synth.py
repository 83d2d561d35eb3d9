"""Deterministic generators for multimodal synthetic datasets.

Each generator returns a MultimodalDataset whose modalities share the sample
order and labels; regenerating with the same seed is bit-identical.

The three families:

* swiss_roll_pair - one set of surface samples embedded as two slightly
  different rolls, each with localized "topological noise" (a radial bridge
  pulling adjacent loops within neighbor range) at modality-specific spots.
* blobs - 2-d Gaussian clusters whose centers are drawn independently per
  modality, so each modality confuses a different subset of clusters.
* circles - four classes on two concentric circles per modality, paired so
  that each modality merges a different pair of classes; only jointly are
  all four separable.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graph import PointCloud

ROLL_U_MIN = 1.5 * np.pi
ROLL_U_MAX = 4.5 * np.pi
ROLL_V_MAX = 20.0
DEFAULT_SHORTCUTS = (
    ((3.7 * np.pi, 3.9 * np.pi),),
    ((4.1 * np.pi, 4.3 * np.pi),),
)


@dataclass(frozen=True)
class MultimodalDataset:
    """Point clouds over the same samples, plus optional diagnostics.

    ``intrinsic_param`` carries a latent per-sample coordinate when the
    generator has one (the roll's angular parameter); ``shortcut_indices``
    lists, per modality, the sample indices that received topological noise.
    """

    modalities: tuple
    intrinsic_param: np.ndarray | None
    seed: int
    shortcut_indices: tuple | None = None

    def __post_init__(self):
        if len(self.modalities) < 1:
            raise ParameterError("dataset needs at least one modality")
        first = self.modalities[0]
        for pc in self.modalities[1:]:
            if pc.n != first.n:
                raise ParameterError("modalities must share the sample count")
            same = (pc.labels is None and first.labels is None) or (
                pc.labels is not None
                and first.labels is not None
                and np.array_equal(pc.labels, first.labels)
            )
            if not same:
                raise ParameterError("modalities must share the label vector")

    @property
    def n(self) -> int:
        return self.modalities[0].n

    @property
    def labels(self):
        return self.modalities[0].labels


def _shortcut_pull(u: np.ndarray, regions) -> np.ndarray:
    """Smooth bump in [0, 1] over each region: 1 means fully pulled to the
    adjacent inner loop."""
    pull = np.zeros_like(u)
    for a, b in regions:
        if not b > a:
            raise ParameterError(f"shortcut region ({a}, {b}) must have b > a")
        inside = (u >= a) & (u <= b)
        pull[inside] = np.maximum(
            pull[inside], np.sin(np.pi * (u[inside] - a) / (b - a)) ** 2
        )
    return pull


def _covered_length(regions, lo, hi):
    spans = sorted((max(a, lo), min(b, hi)) for a, b in regions if b > lo and a < hi)
    total, reach = 0.0, lo
    for a, b in spans:
        a = max(a, reach)
        if b > a:
            total += b - a
            reach = b
    return total


def swiss_roll_pair(
    n: int = 800,
    noise_sigma: float = 0.0,
    shortcut_regions=None,
    seed: int = 0,
) -> MultimodalDataset:
    """Two embeddings of one roll surface with modality-specific shortcuts.

    The base surface is (u cos u, v, u sin u) with u uniform on
    [3 pi / 2, 9 pi / 2] and v uniform on [0, 20]; the second modality uses a
    smooth monotone reparameterization of u. Within each modality's shortcut
    regions (intervals of the intrinsic angular parameter), points are pulled
    radially toward the adjacent inner loop, putting consecutive loops within
    k-NN range there. ``intrinsic_param`` records u.
    """
    if n < 100:
        raise ParameterError(f"n must be >= 100, got {n}")
    if noise_sigma < 0:
        raise ParameterError(f"noise_sigma must be >= 0, got {noise_sigma}")
    regions = DEFAULT_SHORTCUTS if shortcut_regions is None else tuple(
        tuple(r) for r in shortcut_regions
    )
    if len(regions) != 2:
        raise ParameterError("shortcut_regions must list intervals for exactly 2 modalities")
    for mod_regions in regions:
        covered = _covered_length(mod_regions, ROLL_U_MIN, ROLL_U_MAX)
        if covered >= 0.95 * (ROLL_U_MAX - ROLL_U_MIN):
            warnings.warn(
                "shortcut regions cover (nearly) the whole roll; the clean "
                "surface is no longer distinguishable from the noise",
                stacklevel=2,
            )

    rng = np.random.default_rng(seed)
    u = rng.uniform(ROLL_U_MIN, ROLL_U_MAX, n)
    v = rng.uniform(0.0, ROLL_V_MAX, n)
    u2 = u + 0.35 * np.sin(2.0 * (u - ROLL_U_MIN))

    clouds = []
    shortcut_idx = []
    for name, angle, mod_regions in (("roll_1", u, regions[0]), ("roll_2", u2, regions[1])):
        pull = _shortcut_pull(u, mod_regions)
        radius = angle - 2.0 * np.pi * pull
        pts = np.column_stack([radius * np.cos(angle), v, radius * np.sin(angle)])
        if noise_sigma > 0:
            pts = pts + rng.normal(0.0, noise_sigma, pts.shape)
        clouds.append(PointCloud(points=pts, modality_name=name))
        shortcut_idx.append(np.flatnonzero(pull > 0))

    return MultimodalDataset(
        modalities=tuple(clouds),
        intrinsic_param=u,
        seed=seed,
        shortcut_indices=tuple(shortcut_idx),
    )


def blobs(
    n_per_cluster: int = 40,
    n_clusters: int = 6,
    sigma_per_modality=(0.8, 0.8),
    seed: int = 0,
    center_box: float = 5.0,
) -> MultimodalDataset:
    """Two 2-d Gaussian-blob modalities with independently drawn centers.

    Random center placement makes each modality separate some clusters well
    and collide others; which clusters collide differs between modalities.
    """
    if n_clusters < 2:
        raise ParameterError(f"n_clusters must be >= 2, got {n_clusters}")
    if n_per_cluster < 1:
        raise ParameterError(f"n_per_cluster must be >= 1, got {n_per_cluster}")
    if len(sigma_per_modality) != 2:
        raise ParameterError("sigma_per_modality must give one sigma per modality (2)")
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(n_clusters), n_per_cluster)
    n = labels.size
    clouds = []
    for mod, sigma in enumerate(sigma_per_modality):
        centers = rng.uniform(-center_box, center_box, (n_clusters, 2))
        pts = centers[labels] + rng.normal(0.0, sigma, (n, 2))
        clouds.append(PointCloud(points=pts, labels=labels, modality_name=f"blobs_{mod + 1}"))
    return MultimodalDataset(modalities=tuple(clouds), intrinsic_param=None, seed=seed)


def circles(
    n: int = 400,
    seed: int = 0,
    radii=(1.0, 2.0),
    arcs_per_class: int = 4,
    radial_sigma: float = 0.03,
) -> MultimodalDataset:
    """Four classes on concentric circles, merged differently per modality.

    Modality 1 puts classes {0, 1} on the inner circle and {2, 3} on the
    outer one; modality 2 pairs {0, 2} and {1, 3}. On its circle each class
    occupies ``arcs_per_class`` arcs alternating with the other class, with a
    random phase, so the merged pair is geometrically indistinguishable
    within a single modality.
    """
    if n % 4 != 0:
        raise ParameterError(f"n must be divisible by 4, got {n}")
    if n < 8:
        raise ParameterError(f"n must be >= 8, got {n}")
    if arcs_per_class < 1:
        raise ParameterError(f"arcs_per_class must be >= 1, got {arcs_per_class}")
    rng = np.random.default_rng(seed)
    labels = np.repeat(np.arange(4), n // 4)
    groupings = (((0, 1), (2, 3)), ((0, 2), (1, 3)))

    clouds = []
    for mod, groups in enumerate(groupings):
        pts = np.empty((n, 2))
        for radius, pair in zip(radii, groups):
            phase = rng.uniform(0.0, 2.0 * np.pi)
            arc_width = 2.0 * np.pi / (2 * arcs_per_class)
            for slot, cls in enumerate(pair):
                # shuffle so arc membership is independent across modalities
                members = rng.permutation(np.flatnonzero(labels == cls))
                # class `slot` owns every other arc of the circle
                arc_of = (2 * (np.arange(members.size) % arcs_per_class) + slot) * arc_width
                theta = phase + arc_of + rng.uniform(0.0, arc_width, members.size)
                rad = radius + rng.normal(0.0, radial_sigma, members.size)
                pts[members, 0] = rad * np.cos(theta)
                pts[members, 1] = rad * np.sin(theta)
        clouds.append(PointCloud(points=pts, labels=labels, modality_name=f"circles_{mod + 1}"))
    return MultimodalDataset(modalities=tuple(clouds), intrinsic_param=None, seed=seed)
