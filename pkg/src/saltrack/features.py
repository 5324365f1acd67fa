"""HoG and intensity features on a shared cell grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError


@dataclass(frozen=True)
class HogConfig:
    cell_size: int = 4
    n_bins: int = 9
    clip: float = 0.2
    epsilon: float = 1e-6

    def __post_init__(self):
        if self.cell_size < 1:
            raise InvalidInputError("cell_size must be >= 1")
        if self.n_bins < 2:
            raise InvalidInputError("n_bins must be >= 2")
        if not (0.0 < self.clip <= 1.0):
            raise InvalidInputError("clip must lie in (0, 1]")
        if self.epsilon <= 0.0:
            raise InvalidInputError("epsilon must be > 0")


@dataclass
class FeatureStack:
    """Multi-channel cell-grid features; data has shape (channels, grid_h, grid_w)."""

    data: np.ndarray
    cell_size: int

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def grid_h(self) -> int:
        return self.data.shape[1]

    @property
    def grid_w(self) -> int:
        return self.data.shape[2]


def _central_gradients(img: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Central differences with replicated borders.
    padx = np.pad(img, ((0, 0), (1, 1)), mode="edge")
    pady = np.pad(img, ((1, 1), (0, 0)), mode="edge")
    gx = (padx[:, 2:] - padx[:, :-2]) / 2.0
    gy = (pady[2:, :] - pady[:-2, :]) / 2.0
    return gx, gy


def _cell_histograms(img: np.ndarray, cfg: HogConfig) -> np.ndarray:
    """Magnitude-weighted orientation histograms, shape (grid_h, grid_w, n_bins)."""
    cs = cfg.cell_size
    h, w = img.shape
    gh, gw = h // cs, w // cs
    gx, gy = _central_gradients(img[: gh * cs, : gw * cs])
    mag = np.hypot(gx, gy)
    ang = np.arctan2(gy, gx)
    ang = np.where(ang < 0.0, ang + np.pi, ang)
    ang = np.where(ang >= np.pi, 0.0, ang)

    pos = ang / np.pi * cfg.n_bins
    b0 = np.floor(pos).astype(int) % cfg.n_bins
    frac = pos - np.floor(pos)
    b1 = (b0 + 1) % cfg.n_bins

    rows = np.arange(gh * cs)[:, None] // cs
    cols = np.arange(gw * cs)[None, :] // cs
    cell = (rows * gw + cols) * cfg.n_bins
    hist = np.zeros(gh * gw * cfg.n_bins)
    np.add.at(hist, (cell + b0).ravel(), (mag * (1.0 - frac)).ravel())
    np.add.at(hist, (cell + b1).ravel(), (mag * frac).ravel())
    return hist.reshape(gh, gw, cfg.n_bins)


def _block_normalize(hist: np.ndarray, cfg: HogConfig) -> tuple[np.ndarray, np.ndarray]:
    """L2-hys against the 2x2 block anchored at each cell (edge cells clamp).

    Returns (clipped, out): histograms normalized by block energy and clipped
    at cfg.clip, then the same values renormalized by the clipped block norm.
    """
    gh, gw, _ = hist.shape
    eps2 = cfg.epsilon * cfg.epsilon
    energy = np.pad((hist * hist).sum(axis=2), ((0, 1), (0, 1)), mode="edge")
    block = (
        energy[:gh, :gw]
        + energy[1 : gh + 1, :gw]
        + energy[:gh, 1 : gw + 1]
        + energy[1 : gh + 1, 1 : gw + 1]
    )
    norm1 = np.sqrt(block + eps2)
    clipped = np.minimum(hist / norm1[:, :, None], cfg.clip)

    hist_pad = np.pad(hist, ((0, 1), (0, 1), (0, 0)), mode="edge")
    clipped_energy = np.zeros((gh, gw))
    for di in (0, 1):
        for dj in (0, 1):
            q = np.minimum(
                hist_pad[di : gh + di, dj : gw + dj] / norm1[:, :, None], cfg.clip
            )
            clipped_energy += (q * q).sum(axis=2)
    norm2 = np.sqrt(clipped_energy + eps2)
    return clipped, clipped / norm2[:, :, None]


def hog(img: np.ndarray, cfg: HogConfig = HogConfig()) -> FeatureStack:
    """Per-cell unsigned-orientation histograms with L2-hys block normalization.

    Gradient angles are folded to [0, pi) and voted into the two nearest of
    `n_bins` bins (centers at k*pi/n_bins, circular), weighted by gradient
    magnitude. Each cell's histogram is normalized against the energy of the
    2x2 cell block anchored at the cell (clamped at the grid edge), clipped at
    `clip`, then renormalized against the clipped block. The grid covers
    floor(size / cell_size) cells per dimension.
    """
    h, w = img.shape
    gh, gw = h // cfg.cell_size, w // cfg.cell_size
    if gh < 1 or gw < 1:
        raise InvalidInputError(
            f"image {w}x{h} smaller than one {cfg.cell_size}px cell"
        )
    _, out = _block_normalize(_cell_histograms(img, cfg), cfg)
    return FeatureStack(np.ascontiguousarray(out.transpose(2, 0, 1)), cfg.cell_size)


def intensity_feature(img: np.ndarray, cell_size: int) -> FeatureStack:
    """One channel of per-cell mean intensity, zero-meaned over the grid."""
    h, w = img.shape
    gh, gw = h // cell_size, w // cell_size
    if gh < 1 or gw < 1:
        raise InvalidInputError(f"image {w}x{h} smaller than one {cell_size}px cell")
    crop = img[: gh * cell_size, : gw * cell_size]
    means = crop.reshape(gh, cell_size, gw, cell_size).mean(axis=(1, 3))
    return FeatureStack((means - means.mean())[None, :, :], cell_size)


def apply_window(stack: FeatureStack, window: np.ndarray) -> FeatureStack:
    """Multiply every channel pointwise by `window`."""
    if window.shape != (stack.grid_h, stack.grid_w):
        raise InvalidInputError(
            f"window {window.shape} does not match grid "
            f"({stack.grid_h}, {stack.grid_w})"
        )
    return FeatureStack(stack.data * window[None, :, :], stack.cell_size)


def concat(stacks: list[FeatureStack]) -> FeatureStack:
    """Concatenate channel groups sharing one grid and cell size."""
    first = stacks[0]
    for s in stacks[1:]:
        if (s.grid_h, s.grid_w, s.cell_size) != (
            first.grid_h,
            first.grid_w,
            first.cell_size,
        ):
            raise InvalidInputError("feature stacks do not share a grid")
    return FeatureStack(np.concatenate([s.data for s in stacks], axis=0), first.cell_size)
