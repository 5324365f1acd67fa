"""Correlation-filter tracking with an adaptively weighted saliency channel."""

from .bench import (
    EvalReport,
    SequenceRecord,
    SuccessCurve,
    auc,
    iou,
    load_dataset,
    load_sequence,
    run_protocol,
    sre_perturbations,
    success_curve,
    tre_segments,
)
from .dcf import (
    CorrelationFilter,
    LabelMap,
    ResponseMap,
    correlate,
    cross_correlate,
    gaussian_label,
    hann_window,
    learn_filter,
    update_filter,
)
from .errors import (
    DatasetError,
    DecodeError,
    InvalidBoxError,
    InvalidInputError,
    ProviderUnavailableError,
)
from .features import FeatureStack, HogConfig, apply_window, hog, intensity_feature
from .imaging import (
    BoundingBox,
    decode_image,
    encode_gray_png,
    extract_patch,
    resize_bilinear,
)
from .saliency import (
    PrecomputedSaliencyProvider,
    SaliencyProvider,
    SpectralResidualProvider,
    cosine_similarity,
    load_saliency_map,
    spectral_residual,
)
from .tracker import (
    FusionConfig,
    FusionWeightState,
    TrackerState,
    fuse_responses,
    init,
    step,
    track_sequence,
    update_weight,
)

__version__ = "0.1.0"
