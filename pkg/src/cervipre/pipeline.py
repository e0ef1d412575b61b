"""End-to-end orchestration: config, per-image processing, batch runs, evaluation.

Stage order is fixed: glare removal strictly precedes ROI segmentation. Each
stage is timed and failures carry the stage name so batch runs can isolate
and report per-image errors.
"""
from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .imagecore import BinaryMask, ImageRGB8, LabImage, crop, label_mask, rgb_to_lab
from .imageio import load_image, save_image, save_mask
from .inpaint import HarmonicSolverConfig, fill_image
from .roi import (
    MAX_CLUSTER_SAMPLES,
    DetectionClass,
    RoiReport,
    assign_to_means,
    classify_detection,
    extract_features,
    extract_roi,
    kmeans,
    select_cervix_cluster,
)
from .specular import SpecularConfig, build_inpaint_mask, detect_specular

__all__ = [
    "STAGE_ORDER",
    "PipelineConfig",
    "PipelineStageError",
    "CervigramReport",
    "GroupSummary",
    "EvalSummary",
    "BatchItemResult",
    "process_image",
    "run_eval",
    "summarize_classifications",
    "process_batch",
    "batch_workers",
]

STAGE_ORDER = (
    "detect_specular",
    "build_inpaint_mask",
    "remove_specular",
    "rgb_to_lab",
    "extract_features",
    "kmeans",
    "select_cervix_cluster",
    "extract_roi",
    "crop",
)

FAILED = "failed"


class PipelineStageError(Exception):
    """A pipeline stage failed; carries the stage name and the original error."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    specular: SpecularConfig = SpecularConfig()
    solver: HarmonicSolverConfig = HarmonicSolverConfig()
    k: int = 2
    seed: int = 42
    connectivity: int = 8
    eval_slack: float = 0.10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")
        if not 0.0 < self.eval_slack < 1.0:
            raise ValueError("eval_slack must lie in (0, 1)")


@dataclass
class CervigramReport:
    """Everything measured while processing one cervigram."""

    input_path: str
    specular_pixel_count: int
    specular_component_count: int
    solver_iterations: int
    roi: RoiReport
    detection: DetectionClass | None
    timings_ms: dict[str, float]

    def to_json_dict(self, include_timings: bool = False) -> dict:
        """Canonical JSON form. Timings are opt-in: they vary run to run and
        would break byte-identical reports under fixed seeds."""
        doc = {
            "input_path": self.input_path,
            "specular_pixel_count": self.specular_pixel_count,
            "specular_component_count": self.specular_component_count,
            "solver_iterations": self.solver_iterations,
            "roi": {
                "bbox": {
                    "x0": self.roi.bbox.x0,
                    "y0": self.roi.bbox.y0,
                    "x1": self.roi.bbox.x1,
                    "y1": self.roi.bbox.y1,
                },
                "area_fraction": self.roi.area_fraction,
                "chosen_cluster": self.roi.chosen_cluster,
                "component_count": self.roi.component_count,
            },
            "detection": self.detection.value if self.detection is not None else None,
        }
        if include_timings:
            doc["timings_ms"] = {k: round(v, 3) for k, v in self.timings_ms.items()}
        return doc


@contextmanager
def _stage(name: str, timings: dict[str, float]):
    start = time.perf_counter()
    try:
        yield
    except Exception as exc:
        raise PipelineStageError(name, exc) from exc
    finally:
        timings[name] = (time.perf_counter() - start) * 1000.0


def _decimation_stride(width: int, height: int) -> int:
    total = width * height
    if total <= MAX_CLUSTER_SAMPLES:
        return 1
    stride = max(2, int((total / MAX_CLUSTER_SAMPLES) ** 0.5))
    while -(-width // stride) * -(-height // stride) > MAX_CLUSTER_SAMPLES:
        stride += 1
    return stride




def process_image(
    img: ImageRGB8,
    cfg: PipelineConfig,
    *,
    input_path: str = "",
    truth_roi: BinaryMask | None = None,
) -> tuple[ImageRGB8, ImageRGB8, CervigramReport]:
    """Run the full preprocessing chain on one cervigram.

    Returns the inpainted frame, the ROI crop, and the report. When a ground
    truth ROI mask is supplied the detection is classified against it.
    Stage failures surface as PipelineStageError with the stage name.
    """
    timings: dict[str, float] = {}

    with _stage("detect_specular", timings):
        raw_glare = detect_specular(img, cfg.specular)
    with _stage("build_inpaint_mask", timings):
        glare_mask = build_inpaint_mask(raw_glare, cfg.specular)
        _, component_count = label_mask(glare_mask, cfg.connectivity)
    with _stage("remove_specular", timings):
        inpainted, fills = fill_image(img, glare_mask, cfg.solver)
    with _stage("rgb_to_lab", timings):
        lab = rgb_to_lab(inpainted)
    with _stage("extract_features", timings):
        stride = _decimation_stride(img.width, img.height)
        cluster_input = lab if stride == 1 else LabImage(lab.values[::stride, ::stride])
        features = extract_features(cluster_input)
    with _stage("kmeans", timings):
        sample_model = kmeans(features, cfg.k, cfg.seed)
        if stride == 1:
            model = sample_model
        else:
            model = assign_to_means(
                lab, sample_model.means, sample_model.iterations, sample_model.converged
            )
    with _stage("select_cervix_cluster", timings):
        chosen = select_cervix_cluster(model, img.width, img.height)
    with _stage("extract_roi", timings):
        roi_report = extract_roi(model, chosen, img.width, img.height)
    with _stage("crop", timings):
        cropped = crop(inpainted, roi_report.bbox)

    detection = None
    if truth_roi is not None:
        detection = classify_detection(roi_report.roi_mask, truth_roi, cfg.eval_slack)

    report = CervigramReport(
        input_path=input_path,
        specular_pixel_count=glare_mask.count,
        specular_component_count=component_count,
        solver_iterations=max((f.iterations_used for f in fills), default=0),
        roi=roi_report,
        detection=detection,
        timings_ms=timings,
    )
    return inpainted, cropped, report


@dataclass(frozen=True)
class GroupSummary:
    total: int
    counts: dict[str, int]
    percentages: dict[str, float]


@dataclass(frozen=True)
class EvalSummary:
    """Detection tallies per dataset group; Failed counts pipeline errors."""

    groups: dict[str, GroupSummary]

    def to_json_dict(self) -> dict:
        return {
            "groups": {
                name: {
                    "total": g.total,
                    "counts": g.counts,
                    "percentages": g.percentages,
                }
                for name, g in self.groups.items()
            }
        }


_CLASS_KEYS = (
    DetectionClass.CORRECT.value,
    DetectionClass.MORE.value,
    DetectionClass.LESS.value,
    FAILED,
)


def summarize_classifications(
    tagged: Iterable[tuple[str, DetectionClass | None]],
) -> EvalSummary:
    """Aggregate (group, detection) pairs; None means the image failed."""
    per_group: dict[str, dict[str, int]] = {}
    for group, detection in tagged:
        counts = per_group.setdefault(group, {key: 0 for key in _CLASS_KEYS})
        counts[detection.value if detection is not None else FAILED] += 1
    groups = {}
    for name, counts in per_group.items():
        total = sum(counts.values())
        percentages = {key: 100.0 * counts[key] / total for key in _CLASS_KEYS}
        groups[name] = GroupSummary(total=total, counts=counts, percentages=percentages)
    return EvalSummary(groups=groups)


def run_eval(
    dataset: Sequence[tuple[ImageRGB8, BinaryMask, str]], cfg: PipelineConfig
) -> EvalSummary:
    """Process every (image, truth ROI, group) item and tally detections per group.

    Per-image pipeline failures are tallied under "failed" rather than
    aborting the run.
    """
    if not dataset:
        raise ValueError("dataset is empty")
    for _, truth, _ in dataset:
        if truth.count == 0:
            raise ValueError("every ground-truth ROI mask must be nonempty")
    tagged: list[tuple[str, DetectionClass | None]] = []
    for img, truth, group in dataset:
        try:
            _, _, report = process_image(img, cfg, truth_roi=truth)
            tagged.append((group, report.detection))
        except PipelineStageError:
            tagged.append((group, None))
    return summarize_classifications(tagged)


@dataclass
class BatchItemResult:
    input_path: str
    report: CervigramReport | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def batch_workers(item_count: int) -> int:
    """Worker count for batch runs; the CERVIPRE_THREADS env var caps it."""
    env = os.environ.get("CERVIPRE_THREADS")
    if env is not None:
        try:
            cap = int(env)
        except ValueError as exc:
            raise ValueError(f"CERVIPRE_THREADS must be an integer, got {env!r}") from exc
        if cap < 1:
            raise ValueError("CERVIPRE_THREADS must be >= 1")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, item_count))


def write_artifacts(
    stem: str,
    out_dir: Path,
    inpainted: ImageRGB8,
    cropped: ImageRGB8,
    report: CervigramReport,
    glare_mask: BinaryMask,
    roi_mask: BinaryMask,
    include_timings: bool = False,
) -> None:
    """Write the five per-image artifacts for one processed cervigram."""
    save_image(inpainted, out_dir / f"{stem}.inpainted.png")
    save_image(cropped, out_dir / f"{stem}.roi.png")
    save_mask(roi_mask, out_dir / f"{stem}.roimask.png")
    save_mask(glare_mask, out_dir / f"{stem}.glaremask.png")
    doc = report.to_json_dict(include_timings=include_timings)
    (out_dir / f"{stem}.report.json").write_text(json.dumps(doc, indent=2) + "\n")


def _process_one_path(
    path: str, out_dir: Path, cfg: PipelineConfig, include_timings: bool
) -> BatchItemResult:
    try:
        img = load_image(path)
        inpainted, cropped, report = process_image(img, cfg, input_path=str(path))
        # Re-derive the dilated mask for the artifact; cheap, and it keeps the
        # process_image signature free of extra state.
        glare_mask = build_inpaint_mask(detect_specular(img, cfg.specular), cfg.specular)
        write_artifacts(
            Path(path).stem,
            out_dir,
            inpainted,
            cropped,
            report,
            glare_mask,
            report.roi.roi_mask,
            include_timings,
        )
        return BatchItemResult(input_path=str(path), report=report)
    except Exception as exc:
        return BatchItemResult(input_path=str(path), error=str(exc))


def process_batch(
    paths: Sequence[str | Path],
    out_dir: str | Path,
    cfg: PipelineConfig,
    *,
    include_timings: bool = False,
) -> list[BatchItemResult]:
    """Process many images in parallel; results come back in input order.

    Each image is an isolated deterministic unit: one failure never blocks
    the others. Parallelism is capped by CERVIPRE_THREADS.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    workers = batch_workers(len(paths))
    if workers == 1:
        return [_process_one_path(str(p), out, cfg, include_timings) for p in paths]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(
            pool.map(lambda p: _process_one_path(str(p), out, cfg, include_timings), paths)
        )
