"""Dual-filter tracker fusing appearance and saliency responses.

Each frame runs two correlation filters: one over HoG+intensity features from
a wide search region, one over a saliency map from a narrower region. The
saliency response enters the fused score with a weight driven by the temporal
consistency of consecutive saliency maps, so inconsistent saliency is
suppressed automatically.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dcf import (
    CorrelationFilter,
    LabelMap,
    ResponseMap,
    correlate,
    default_label_sigma,
    gaussian_label,
    hann_window,
    learn_filter,
    update_filter,
)
from .errors import InvalidInputError, ProviderUnavailableError
from .features import FeatureStack, HogConfig, apply_window, concat, hog, intensity_feature
from .imaging import BoundingBox, extract_patch, rasterize_box, resize_bilinear
from .saliency import (
    SaliencyProvider,
    SpectralResidualProvider,
    cosine_similarity,
    spectral_residual,
)

FEATURE_MODEL_SIZE = 128  # feature search patches are resampled to this square
SALIENCY_GRID = 64        # saliency maps are resampled to this square grid

WEIGHT_RULES = ("literal", "capped-ema")

_CONFIG_FIELDS = {
    "k": float,
    "lambda_w": float,
    "w0": float,
    "feature_region_scale": float,
    "saliency_region_scale": float,
    "weight_rule": str,
    "eta_feat": float,
    "eta_sal": float,
    "lambda_reg": float,
    "cell_size": int,
    "saliency_provider": str,
}


@dataclass(frozen=True)
class FusionConfig:
    """Tracker parameters; defaults follow the reference operating point."""

    k: float = 0.25
    lambda_w: float = 0.01
    w0: float = 0.125
    feature_region_scale: float = 2.0
    saliency_region_scale: float = 1.5
    weight_rule: str = "literal"
    eta_feat: float = 0.02
    eta_sal: float = 0.01
    lambda_reg: float = 0.01
    cell_size: int = 4
    saliency_provider: str = "spectral"

    def __post_init__(self):
        if not 0.0 <= self.k <= 1.0:
            raise InvalidInputError("k must lie in [0, 1]")
        if not 0.0 <= self.lambda_w <= 1.0:
            raise InvalidInputError("lambda_w must lie in [0, 1]")
        if not 0.0 <= self.w0 <= self.k:
            raise InvalidInputError("w0 must lie in [0, k]")
        if self.saliency_region_scale > self.feature_region_scale:
            raise InvalidInputError(
                "saliency_region_scale must not exceed feature_region_scale"
            )
        if self.saliency_region_scale <= 0:
            raise InvalidInputError("region scales must be > 0")
        if self.weight_rule not in WEIGHT_RULES:
            raise InvalidInputError(f"weight_rule must be one of {WEIGHT_RULES}")
        if not 0.0 <= self.eta_feat <= 1.0 or not 0.0 <= self.eta_sal <= 1.0:
            raise InvalidInputError("learning rates must lie in [0, 1]")
        if self.lambda_reg <= 0:
            raise InvalidInputError("lambda_reg must be > 0")
        if self.cell_size < 1 or FEATURE_MODEL_SIZE % self.cell_size != 0:
            raise InvalidInputError(
                f"cell_size must divide {FEATURE_MODEL_SIZE}, got {self.cell_size}"
            )
        if self.saliency_provider not in ("spectral", "precomputed"):
            raise InvalidInputError(
                "saliency_provider must be 'spectral' or 'precomputed'"
            )


def parse_config(path: str | Path) -> FusionConfig:
    """Read a flat key=value config file ('#' starts a comment)."""
    values: dict[str, object] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_FIELDS:
            raise InvalidInputError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _CONFIG_FIELDS[key](value.strip())
    return FusionConfig(**values)


def config_hash(cfg: FusionConfig) -> str:
    """Stable hash of the full configuration, for run provenance."""
    canonical = "\n".join(
        f"{name}={getattr(cfg, name)!r}" for name in sorted(_CONFIG_FIELDS)
    )
    return hashlib.sha256(canonical.encode()).hexdigest()


def make_provider(cfg: FusionConfig, sequence_dir: str | Path | None = None) -> SaliencyProvider:
    if cfg.saliency_provider == "precomputed":
        if sequence_dir is None:
            raise InvalidInputError("precomputed saliency needs a sequence directory")
        from .saliency import PrecomputedSaliencyProvider

        return PrecomputedSaliencyProvider(sequence_dir)
    return SpectralResidualProvider()


@dataclass
class FusionWeightState:
    """Current saliency weight and the map it will be compared against."""

    w: float
    t: int = 0
    last_saliency: np.ndarray | None = None


@dataclass
class StepDiagnostics:
    frame: int
    sim: float
    w: float
    peak_feat: float
    peak_sal: float
    peak_fused: float
    saliency_fallback: bool
    sim_clamped: bool = False


@dataclass
class TrackerState:
    """Single-owner tracker state; `step` mutates it in place."""

    box: BoundingBox
    cfg: FusionConfig
    provider: SaliencyProvider
    frame_shape: tuple[int, int]
    feat_filter: CorrelationFilter
    sal_filter: CorrelationFilter
    feat_label: LabelMap
    sal_label: LabelMap
    feat_window: np.ndarray
    sal_window: np.ndarray
    weight: FusionWeightState
    frame_index: int
    diagnostics: list[StepDiagnostics] = field(default_factory=list)


def update_weight(state: FusionWeightState, sim: float, cfg: FusionConfig) -> float:
    """Advance the saliency weight one step and store the result.

    literal:    w(t+1) = k * ((1 - lambda_w) * w(t) + lambda_w * sim)
    capped-ema: w(t+1) = (1 - lambda_w) * w(t) + lambda_w * k * sim

    Out-of-range similarities are clamped; callers can detect the clamp by
    comparing against the raw value.
    """
    sim = min(max(sim, 0.0), 1.0)
    if cfg.weight_rule == "literal":
        w = cfg.k * ((1.0 - cfg.lambda_w) * state.w + cfg.lambda_w * sim)
    else:
        w = (1.0 - cfg.lambda_w) * state.w + cfg.lambda_w * cfg.k * sim
    state.w = w
    state.t += 1
    return w


def fuse_responses(r_sal: ResponseMap, r_feat: ResponseMap, w: float) -> ResponseMap:
    """Combine responses as w * r_sal + r_feat on r_feat's pixel frame.

    The saliency map is resampled bilinearly onto the feature grid using both
    maps' cell-to-pixel mappings; feature cells outside the saliency map's
    node hull get saliency contribution 0.
    """
    gh, gw = r_feat.data.shape
    px = r_feat.origin_x + np.arange(gw) * r_feat.cell_w
    py = r_feat.origin_y + np.arange(gh) * r_feat.cell_h
    u = (px - r_sal.origin_x) / r_sal.cell_w
    v = (py - r_sal.origin_y) / r_sal.cell_h

    sh, sw = r_sal.data.shape
    inside = (v[:, None] >= 0.0) & (v[:, None] <= sh - 1) & (u[None, :] >= 0.0) & (
        u[None, :] <= sw - 1
    )
    u0 = np.floor(u).astype(int)
    v0 = np.floor(v).astype(int)
    fu = u - u0
    fv = v - v0
    u0c = np.clip(u0, 0, sw - 1)
    u1c = np.clip(u0 + 1, 0, sw - 1)
    v0c = np.clip(v0, 0, sh - 1)
    v1c = np.clip(v0 + 1, 0, sh - 1)
    a = r_sal.data[np.ix_(v0c, u0c)]
    b = r_sal.data[np.ix_(v0c, u1c)]
    c = r_sal.data[np.ix_(v1c, u0c)]
    d = r_sal.data[np.ix_(v1c, u1c)]
    top = a + fu[None, :] * (b - a)
    bot = c + fu[None, :] * (d - c)
    aligned = np.where(inside, top + fv[:, None] * (bot - top), 0.0)

    return ResponseMap(
        r_feat.data + w * aligned,
        cell_w=r_feat.cell_w,
        cell_h=r_feat.cell_h,
        origin_x=r_feat.origin_x,
        origin_y=r_feat.origin_y,
    )


def _patch_geometry(box: BoundingBox, scale: float, grid_n: int):
    """Rasterized search patch for `box` scaled by `scale`, plus its response
    mapping: frame-pixel cell size and the pixel cell (0,0) maps to. The
    mapping sends the grid's center cell to the patch center, so a peak at the
    center cell reproduces the previous target position exactly."""
    x, y, w, h = rasterize_box(box.scaled(scale))
    cell_w = w / grid_n
    cell_h = h / grid_n
    origin_x = x + w / 2.0 - (grid_n // 2) * cell_w
    origin_y = y + h / 2.0 - (grid_n // 2) * cell_h
    return BoundingBox(x, y, w, h), cell_w, cell_h, origin_x, origin_y


def feature_patch_stack(
    frame: np.ndarray, box: BoundingBox, cfg: FusionConfig, window: np.ndarray
):
    """Windowed feature stack for the box's search region, with its response
    mapping (cell_w, cell_h, origin_x, origin_y)."""
    grid_n = FEATURE_MODEL_SIZE // cfg.cell_size
    patch_box, cell_w, cell_h, ox, oy = _patch_geometry(
        box, cfg.feature_region_scale, grid_n
    )
    patch = extract_patch(frame, patch_box)
    model = resize_bilinear(patch, FEATURE_MODEL_SIZE, FEATURE_MODEL_SIZE)
    stack = concat(
        [hog(model, HogConfig(cell_size=cfg.cell_size)), intensity_feature(model, cfg.cell_size)]
    )
    return apply_window(stack, window), (cell_w, cell_h, ox, oy)


def saliency_patch_map(
    frame: np.ndarray,
    box: BoundingBox,
    cfg: FusionConfig,
    provider: SaliencyProvider,
    frame_index: int,
):
    """Saliency map of the box's saliency region on the 64x64 model grid.

    Returns (map, mapping, fallback) where `fallback` reports that the
    provider was unavailable and the built-in method was used instead.
    """
    patch_box, cell_w, cell_h, ox, oy = _patch_geometry(
        box, cfg.saliency_region_scale, SALIENCY_GRID
    )
    patch = extract_patch(frame, patch_box)
    if min(patch.shape) < 8:
        # Tiny targets can give sub-8px saliency patches; the providers need
        # at least 8x8.
        patch = resize_bilinear(patch, max(8, patch.shape[1]), max(8, patch.shape[0]))
    fallback = False
    try:
        sal = provider.saliency(patch, frame_index, patch_box)
    except ProviderUnavailableError:
        sal = spectral_residual(patch)
        fallback = True
    model = resize_bilinear(sal, SALIENCY_GRID, SALIENCY_GRID)
    return model, (cell_w, cell_h, ox, oy), fallback


def _saliency_stack(sal_model: np.ndarray, window: np.ndarray) -> FeatureStack:
    return apply_window(FeatureStack(sal_model[None, :, :], 1), window)


def _clamp_to_frame(box: BoundingBox, frame_w: int, frame_h: int) -> BoundingBox:
    x0 = max(box.x, 0.0)
    y0 = max(box.y, 0.0)
    x1 = min(box.x + box.w, float(frame_w))
    y1 = min(box.y + box.h, float(frame_h))
    if x1 - x0 <= 0 or y1 - y0 <= 0:
        raise InvalidInputError(f"box {box!r} lies outside the {frame_w}x{frame_h} frame")
    return BoundingBox(x0, y0, x1 - x0, y1 - y0)


def init(
    frame: np.ndarray,
    box: BoundingBox,
    cfg: FusionConfig = FusionConfig(),
    provider: SaliencyProvider | None = None,
    frame_index: int = 0,
) -> TrackerState:
    """Learn both filters from the first frame and seed the weight state."""
    if provider is None:
        provider = make_provider(cfg)
    frame_h, frame_w = frame.shape
    box = _clamp_to_frame(box, frame_w, frame_h)
    if box.w * box.h < 16.0:
        raise InvalidInputError(f"target box area {box.w * box.h:.1f} px^2 is below 16")

    grid_n = FEATURE_MODEL_SIZE // cfg.cell_size
    feat_window = hann_window(grid_n, grid_n)
    sal_window = hann_window(SALIENCY_GRID, SALIENCY_GRID)
    feat_label = gaussian_label(grid_n, grid_n, default_label_sigma(grid_n, grid_n))
    sal_label = gaussian_label(
        SALIENCY_GRID, SALIENCY_GRID, default_label_sigma(SALIENCY_GRID, SALIENCY_GRID)
    )

    stack, _ = feature_patch_stack(frame, box, cfg, feat_window)
    feat_filter = learn_filter(stack, feat_label, cfg.lambda_reg, cfg.eta_feat)

    sal_model, _, fallback = saliency_patch_map(frame, box, cfg, provider, frame_index)
    sal_filter = learn_filter(
        _saliency_stack(sal_model, sal_window), sal_label, cfg.lambda_reg, cfg.eta_sal
    )

    state = TrackerState(
        box=box,
        cfg=cfg,
        provider=provider,
        frame_shape=frame.shape,
        feat_filter=feat_filter,
        sal_filter=sal_filter,
        feat_label=feat_label,
        sal_label=sal_label,
        feat_window=feat_window,
        sal_window=sal_window,
        weight=FusionWeightState(w=cfg.w0, t=0, last_saliency=sal_model),
        frame_index=frame_index,
    )
    state.diagnostics.append(
        StepDiagnostics(
            frame=frame_index,
            sim=float("nan"),
            w=cfg.w0,
            peak_feat=float("nan"),
            peak_sal=float("nan"),
            peak_fused=float("nan"),
            saliency_fallback=fallback,
        )
    )
    return state


def step(state: TrackerState, frame: np.ndarray) -> tuple[BoundingBox, StepDiagnostics]:
    """Track one frame: localize at the fused response peak, then update.

    Search patches are extracted around the previous box, the two filters are
    evaluated, the saliency weight advances by the similarity of consecutive
    saliency maps, and the box recenters on the argmax of the fused response
    (size held fixed). Both filters and the stored saliency map then update at
    the new location. Raises before touching state, so a failed call leaves
    the previous state intact.
    """
    if frame.shape != state.frame_shape:
        raise InvalidInputError(
            f"frame dimensions changed from {state.frame_shape} to {frame.shape}"
        )
    cfg = state.cfg
    frame_h, frame_w = frame.shape
    index = state.frame_index + 1

    stack, (fcw, fch, fox, foy) = feature_patch_stack(frame, state.box, cfg, state.feat_window)
    r_feat = correlate(state.feat_filter, stack, fcw, fch, fox, foy)

    sal_model, (scw, sch, sox, soy), fallback = saliency_patch_map(
        frame, state.box, cfg, state.provider, index
    )
    r_sal = correlate(
        state.sal_filter, _saliency_stack(sal_model, state.sal_window), scw, sch, sox, soy
    )

    raw_sim = cosine_similarity(state.weight.last_saliency, sal_model)
    sim = min(max(raw_sim, 0.0), 1.0)
    w = update_weight(state.weight, sim, cfg)

    fused = fuse_responses(r_sal, r_feat, w)
    row, col = fused.argmax_cell()
    cx, cy = fused.cell_to_pixel(row, col)
    # Sanity bounds: keep the box within one frame's reach of the image.
    x = min(max(cx - state.box.w / 2.0, -state.box.w), 2.0 * frame_w)
    y = min(max(cy - state.box.h / 2.0, -state.box.h), 2.0 * frame_h)
    new_box = BoundingBox(x, y, state.box.w, state.box.h)

    new_stack, _ = feature_patch_stack(frame, new_box, cfg, state.feat_window)
    state.feat_filter = update_filter(state.feat_filter, new_stack, state.feat_label)
    new_sal, _, update_fallback = saliency_patch_map(
        frame, new_box, cfg, state.provider, index
    )
    state.sal_filter = update_filter(
        state.sal_filter, _saliency_stack(new_sal, state.sal_window), state.sal_label
    )
    state.weight.last_saliency = new_sal
    state.box = new_box
    state.frame_index = index

    diag = StepDiagnostics(
        frame=index,
        sim=sim,
        w=w,
        peak_feat=r_feat.peak,
        peak_sal=r_sal.peak,
        peak_fused=fused.peak,
        saliency_fallback=fallback or update_fallback,
        sim_clamped=raw_sim != sim,
    )
    state.diagnostics.append(diag)
    return new_box, diag


def track_sequence(
    frames,
    init_box: BoundingBox,
    cfg: FusionConfig = FusionConfig(),
    provider: SaliencyProvider | None = None,
    frame_index_base: int = 0,
) -> tuple[list[BoundingBox], list[StepDiagnostics]]:
    """Run the tracker over an iterable of frames; the first frame initializes.

    Returns one box per frame (the first is the clamped init box) and the
    matching diagnostics.
    """
    it = iter(frames)
    try:
        first = next(it)
    except StopIteration:
        raise InvalidInputError("cannot track an empty sequence") from None
    state = init(first, init_box, cfg, provider, frame_index=frame_index_base)
    boxes = [state.box]
    for frame in it:
        box, _ = step(state, frame)
        boxes.append(box)
    return boxes, state.diagnostics
