"""Saliency providers and the temporal-consistency similarity measure."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import InvalidInputError, ProviderUnavailableError
from .imaging import BoundingBox, decode_image, extract_patch, resize_bilinear

_INTERNAL_SIZE = 64
_LOG_EPS = 1e-9
_BLUR_SIGMA = 2.5


def spectral_residual(img: np.ndarray) -> np.ndarray:
    """Bottom-up saliency from the residual of the log-amplitude spectrum.

    The patch is resized to 64x64 and transformed; the residual between the
    log-amplitude spectrum and its 3x3 box-filtered version is re-exponentiated
    and recombined with the original phase, inverse-transformed, squared, and
    blurred with a sigma=2.5 Gaussian (truncated at 4 sigma). Frequency bins
    with zero amplitude carry no phase information and contribute nothing, and
    the mean (DC) component is dropped since it carries no conspicuity; a
    featureless patch therefore maps to the all-zero map. The result is
    max-normalized (all-zero when the maximum is 0), resized back to the input
    size and clamped to [0, 1].
    """
    h, w = img.shape
    if h < 8 or w < 8:
        raise InvalidInputError(f"spectral residual needs at least 8x8, got {w}x{h}")
    small = resize_bilinear(img, _INTERNAL_SIZE, _INTERNAL_SIZE)
    spectrum = np.fft.fft2(small)
    amplitude = np.abs(spectrum)
    phase_factor = np.zeros_like(spectrum)
    nonzero = amplitude > 0.0
    phase_factor[nonzero] = spectrum[nonzero] / amplitude[nonzero]

    log_amp = np.log(amplitude + _LOG_EPS)
    residual = log_amp - ndimage.uniform_filter(log_amp, size=3, mode="nearest")
    recombined = np.exp(residual) * phase_factor
    recombined[0, 0] = 0.0
    sal = np.abs(np.fft.ifft2(recombined)) ** 2
    sal = ndimage.gaussian_filter(sal, sigma=_BLUR_SIGMA, truncate=4.0, mode="nearest")
    peak = sal.max()
    if peak > 0.0:
        sal /= peak
    else:
        sal = np.zeros_like(sal)
    return np.clip(resize_bilinear(sal, w, h), 0.0, 1.0)


def load_saliency_map(
    sequence_dir: str | Path, frame_index: int, patch_box: BoundingBox
) -> np.ndarray:
    """Read a precomputed full-frame saliency map and crop the patch.

    Maps live at <sequence_dir>/saliency/<frame_index as %04d>.png as 8-bit
    grayscale PNGs at full frame size. Missing files raise
    ProviderUnavailableError so callers can fall back to the built-in method.
    """
    path = Path(sequence_dir) / "saliency" / f"{frame_index:04d}.png"
    if not path.is_file():
        raise ProviderUnavailableError(f"no precomputed saliency map at {path}")
    full = decode_image(path.read_bytes())
    return extract_patch(full, patch_box)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of the angle between two vectorized maps; 0 if either is zero."""
    if a.shape != b.shape:
        raise InvalidInputError(f"map shapes differ: {a.shape} vs {b.shape}")
    av = a.ravel()
    bv = b.ravel()
    na2 = np.dot(av, av)
    nb2 = np.dot(bv, bv)
    if na2 == 0.0 or nb2 == 0.0:
        return 0.0
    # Single square root of the norm product loses less than norm() twice.
    return float(np.dot(av, bv) / np.sqrt(na2 * nb2))


class SaliencyProvider:
    """Produces a saliency map for an image patch.

    Output dimensions equal the patch dimensions and values lie in [0, 1].
    `frame_index` and `patch_box` give frame context to providers that read
    precomputed maps; the built-in method ignores them.
    """

    def saliency(
        self, patch: np.ndarray, frame_index: int, patch_box: BoundingBox
    ) -> np.ndarray:
        raise NotImplementedError


class SpectralResidualProvider(SaliencyProvider):
    """Built-in provider backed by the spectral-residual method."""

    def saliency(self, patch, frame_index, patch_box):
        return spectral_residual(patch)


class PrecomputedSaliencyProvider(SaliencyProvider):
    """Provider reading per-frame maps from <sequence_dir>/saliency/."""

    def __init__(self, sequence_dir: str | Path):
        self.sequence_dir = Path(sequence_dir)
        self._cache: tuple[int, np.ndarray] | None = None

    def saliency(self, patch, frame_index, patch_box):
        # Localization and update hit the same frame; cache the last decode.
        if self._cache is not None and self._cache[0] == frame_index:
            full = self._cache[1]
        else:
            path = self.sequence_dir / "saliency" / f"{frame_index:04d}.png"
            if not path.is_file():
                raise ProviderUnavailableError(f"no precomputed saliency map at {path}")
            full = decode_image(path.read_bytes())
            self._cache = (frame_index, full)
        return extract_patch(full, patch_box)
