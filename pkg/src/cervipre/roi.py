"""Cervix ROI extraction: k-means over Lab chromaticity, cluster pick, crop box.

Clustering works on the (a, b) chromaticity pair only; L carries illumination,
not color, and is discarded. The cervix cluster is the reddish one whose
members sit closest to the image center.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence

import numpy as np

from .imagecore import BinaryMask, BoundingBox, LabImage, label_mask

__all__ = [
    "FeatureVector",
    "ClusterModel",
    "RoiReport",
    "DetectionClass",
    "EmptyRoiError",
    "KMEANS_MAX_ITERATIONS",
    "MAX_CLUSTER_SAMPLES",
    "JACCARD_CORRECT_MIN",
    "extract_features",
    "kmeans",
    "assign_to_means",
    "select_cervix_cluster",
    "extract_roi",
    "classify_detection",
]

# Safety cap on Lloyd iterations, on top of the assignments-stable stopping rule.
KMEANS_MAX_ITERATIONS = 500
# Images with more pixels than this are clustered on a decimated grid.
MAX_CLUSTER_SAMPLES = 65_536
# Overlap with ground truth required for a "correct" detection.
JACCARD_CORRECT_MIN = 0.8


class EmptyRoiError(ValueError):
    """The chosen cluster has no member pixels, so no ROI exists."""


class FeatureVector(NamedTuple):
    a: float
    b: float
    pixel: tuple[int, int]


class DetectionClass(Enum):
    CORRECT = "correct"
    MORE = "more"
    LESS = "less"


@dataclass(frozen=True, eq=False)
class ClusterModel:
    """Converged k-means state: means in (a, b) space plus per-pixel assignments."""

    k: int
    means: np.ndarray  # (k, 2) float64
    assignments: np.ndarray  # (n,) int32 cluster index per feature
    pixels: np.ndarray  # (n, 2) int32 (x, y) per feature
    features: np.ndarray  # (n, 2) float64 (a, b) per feature
    iterations: int
    converged: bool
    objective_history: tuple[float, ...]

    def __post_init__(self):
        for name in ("means", "assignments", "pixels", "features"):
            arr = np.array(getattr(self, name), order="C")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


@dataclass(frozen=True, eq=False)
class RoiReport:
    """Largest connected region of the chosen cluster plus its geometry."""

    roi_mask: BinaryMask
    bbox: BoundingBox
    area_fraction: float
    chosen_cluster: int
    component_count: int


def extract_features(lab: LabImage) -> list[FeatureVector]:
    """One (a, b) chromaticity vector per pixel, row-major, L discarded."""
    h, w = lab.height, lab.width
    a = lab.values[:, :, 1].ravel()
    b = lab.values[:, :, 2].ravel()
    ys, xs = np.divmod(np.arange(h * w), w)
    return [
        FeatureVector(float(av), float(bv), (int(x), int(y)))
        for av, bv, x, y in zip(a, b, xs, ys)
    ]


def _as_arrays(features: Sequence[FeatureVector]) -> tuple[np.ndarray, np.ndarray]:
    pts = np.array([(f.a, f.b) for f in features], dtype=np.float64).reshape(-1, 2)
    pix = np.array([f.pixel for f in features], dtype=np.int32).reshape(-1, 2)
    return pts, pix


def _nearest_mean(pts: np.ndarray, means: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Squared-distance assignment; ties resolve to the lowest cluster index."""
    d2 = ((pts[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
    assign = d2.argmin(axis=1).astype(np.int32)
    return assign, d2[np.arange(len(pts)), assign]


def kmeans(features: Sequence[FeatureVector], k: int, seed: int = 42) -> ClusterModel:
    """Lloyd iteration over (a, b) chromaticity vectors.

    Starts from k distinct feature indices drawn with a seeded generator,
    alternates nearest-mean assignment (Euclidean, ties to the lowest index)
    with centroid updates, and stops once assignments repeat between
    consecutive iterations. A cluster left empty by an update is re-seeded
    with the feature farthest from its assigned mean. The within-cluster
    squared-distance objective is checked to be non-increasing every
    iteration.

    Raises ValueError when there are fewer features than clusters.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(features) < k:
        raise ValueError(f"need at least {k} features for k={k}, got {len(features)}")

    pts, pix = _as_arrays(features)
    n = len(pts)
    rng = np.random.default_rng(seed)
    means = pts[rng.choice(n, size=k, replace=False)].copy()

    history: list[float] = []
    prev_assign: np.ndarray | None = None
    assign = np.zeros(n, dtype=np.int32)
    iterations = 0
    converged = False
    while iterations < KMEANS_MAX_ITERATIONS:
        assign, d2 = _nearest_mean(pts, means)
        iterations += 1
        objective = float(d2.sum())
        if history and objective > history[-1] + 1e-9 * max(1.0, history[-1]):
            raise AssertionError(
                f"k-means objective increased: {history[-1]!r} -> {objective!r}"
            )
        history.append(objective)
        if prev_assign is not None and np.array_equal(assign, prev_assign):
            converged = True
            break
        prev_assign = assign

        empty = []
        for j in range(k):
            members = assign == j
            if members.any():
                means[j] = pts[members].sum(axis=0) / members.sum()
            else:
                empty.append(j)
        if empty:
            # Re-seed each empty cluster with the point farthest from its assigned mean.
            spent = ((pts - means[assign]) ** 2).sum(axis=1)
            for j in empty:
                far = int(spent.argmax())
                means[j] = pts[far]
                spent[far] = -1.0

    return ClusterModel(
        k=k,
        means=means,
        assignments=assign,
        pixels=pix,
        features=pts,
        iterations=iterations,
        converged=converged,
        objective_history=tuple(history),
    )


def assign_to_means(
    lab: LabImage, means: np.ndarray, iterations: int = 0, converged: bool = True
) -> ClusterModel:
    """Assign every pixel of an image to its nearest mean (no further iteration).

    Used after clustering a decimated sample: the converged means carry the
    color structure, and the full-resolution assignment paints the masks.
    """
    h, w = lab.height, lab.width
    pts = lab.values[:, :, 1:].reshape(-1, 2).astype(np.float64)
    ys, xs = np.divmod(np.arange(h * w), w)
    pix = np.stack([xs, ys], axis=1).astype(np.int32)
    assign, d2 = _nearest_mean(pts, means)
    return ClusterModel(
        k=len(means),
        means=np.array(means, dtype=np.float64),
        assignments=assign,
        pixels=pix,
        features=pts,
        iterations=iterations,
        converged=converged,
        objective_history=(float(d2.sum()),),
    )


def select_cervix_cluster(model: ClusterModel, width: int, height: int) -> int:
    """Pick the reddish cluster whose members sit closest to the image center.

    Candidates are nonempty clusters with mean a > 0 (red side of the a
    axis); when none qualifies the chromaticity restriction is dropped.
    Ties break to the lowest cluster index.
    """
    center = np.array([(width - 1) / 2.0, (height - 1) / 2.0])
    mean_dist = np.full(model.k, np.inf)
    for j in range(model.k):
        members = model.assignments == j
        if not members.any():
            continue
        offsets = model.pixels[members].astype(np.float64) - center
        mean_dist[j] = float(np.sqrt((offsets**2).sum(axis=1)).mean())
    reddish = (model.means[:, 0] > 0.0) & np.isfinite(mean_dist)
    candidates = mean_dist.copy()
    if reddish.any():
        candidates[~reddish] = np.inf
    return int(candidates.argmin())


def extract_roi(model: ClusterModel, chosen: int, width: int, height: int) -> RoiReport:
    """Reduce the chosen cluster to its largest 8-connected region and box it.

    Raises EmptyRoiError when the chosen cluster has no members.
    """
    if not 0 <= chosen < model.k:
        raise ValueError(f"cluster index {chosen} out of range for k={model.k}")
    members = model.assignments == chosen
    if not members.any():
        raise EmptyRoiError(f"cluster {chosen} has no member pixels")

    cluster = np.zeros((height, width), dtype=bool)
    xy = model.pixels[members]
    cluster[xy[:, 1], xy[:, 0]] = True
    labels, count = label_mask(BinaryMask(cluster), connectivity=8)
    sizes = np.bincount(labels.ravel())[1:]
    largest = int(sizes.argmax()) + 1
    roi = labels == largest

    ys, xs = np.nonzero(roi)
    bbox = BoundingBox(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))
    return RoiReport(
        roi_mask=BinaryMask(roi),
        bbox=bbox,
        area_fraction=float(roi.sum()) / (width * height),
        chosen_cluster=chosen,
        component_count=count,
    )


def classify_detection(
    pred: BinaryMask, truth: BinaryMask, slack: float = 0.10
) -> DetectionClass:
    """Grade a predicted ROI mask against ground truth.

    Correct needs Jaccard >= 0.8 and a predicted/true area ratio within
    1 +/- slack; otherwise the area ratio decides More vs Less.
    """
    if (pred.height, pred.width) != (truth.height, truth.width):
        raise ValueError("prediction and truth dimensions differ")
    if not 0.0 < slack < 1.0:
        raise ValueError("slack must lie in (0, 1)")
    truth_count = truth.count
    if truth_count == 0:
        raise ValueError("ground-truth mask is empty; detection class is undefined")

    ratio = pred.count / truth_count
    union = int((pred.bits | truth.bits).sum())
    jaccard = int((pred.bits & truth.bits).sum()) / union
    if jaccard >= JACCARD_CORRECT_MIN and 1.0 - slack <= ratio <= 1.0 + slack:
        return DetectionClass.CORRECT
    if ratio > 1.0 + slack:
        return DetectionClass.MORE
    return DetectionClass.LESS
