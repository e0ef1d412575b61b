"""Cervigram preprocessing: specular-glare removal and cervix ROI extraction."""

from .imagecore import (
    BinaryMask,
    BoundingBox,
    ConnectedComponent,
    GrayPlane,
    ImageRGB8,
    LabImage,
    StructuringElement,
    connected_components,
    crop,
    dilate,
    label_mask,
    mask_boundary,
    rgb_to_lab,
    split_planes,
)
from .imageio import load_image, load_mask, save_image, save_mask
from .inpaint import (
    FillResult,
    HarmonicSolverConfig,
    NoDirichletDataError,
    fill_image,
    harmonic_fill,
    radial_fundamental_solution,
    remove_specular,
)
from .pipeline import (
    STAGE_ORDER,
    BatchItemResult,
    CervigramReport,
    EvalSummary,
    GroupSummary,
    PipelineConfig,
    PipelineStageError,
    batch_workers,
    process_batch,
    process_image,
    run_eval,
    summarize_classifications,
)
from .roi import (
    ClusterModel,
    DetectionClass,
    EmptyRoiError,
    FeatureVector,
    RoiReport,
    assign_to_means,
    classify_detection,
    extract_features,
    extract_roi,
    kmeans,
    select_cervix_cluster,
)
from .specular import (
    LargeInpaintRegionWarning,
    SpecularConfig,
    build_inpaint_mask,
    detect_specular,
)
from .synthetic import SyntheticSpec, generate_synthetic

__version__ = "0.1.0"
