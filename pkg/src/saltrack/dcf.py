"""Closed-form multi-channel correlation filters in the Fourier domain.

The filter minimizes the circular-convolution ridge cost
``sum_d ||h_d * f_d - g||^2 + lambda_reg * ||h||^2`` for a Gaussian target
``g``; per channel the minimizer has numerator conj(F_d) . G over the shared
denominator sum_d conj(F_d) . F_d + lambda_reg. Responses are evaluated by
pointwise multiplication with the query spectrum and an inverse transform.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .features import FeatureStack


@dataclass
class LabelMap:
    """Gaussian regression target peaking at the grid center cell."""

    data: np.ndarray
    sigma: float

    @property
    def grid_h(self) -> int:
        return self.data.shape[0]

    @property
    def grid_w(self) -> int:
        return self.data.shape[1]

    @property
    def center(self) -> tuple[int, int]:
        return self.data.shape[0] // 2, self.data.shape[1] // 2


@dataclass
class CorrelationFilter:
    """Frequency-domain filter state.

    `numerator` has shape (channels, grid_h, grid_w); `denominator` is shared
    across channels and includes the ridge term once, so its real part is at
    least `lambda_reg` everywhere. `eta` is the online learning rate.
    """

    numerator: np.ndarray
    denominator: np.ndarray
    lambda_reg: float
    eta: float

    @property
    def channels(self) -> int:
        return self.numerator.shape[0]

    @property
    def grid_shape(self) -> tuple[int, int]:
        return self.numerator.shape[1], self.numerator.shape[2]


@dataclass
class ResponseMap:
    """Score grid with an affine cell-to-frame-pixel mapping.

    Cell (row, col) maps to the frame pixel
    (origin_x + col * cell_w, origin_y + row * cell_h).
    """

    data: np.ndarray
    cell_w: float = 1.0
    cell_h: float = 1.0
    origin_x: float = 0.0
    origin_y: float = 0.0

    def argmax_cell(self) -> tuple[int, int]:
        """Peak cell; ties break to the smallest row, then column."""
        idx = int(np.argmax(self.data))
        return idx // self.data.shape[1], idx % self.data.shape[1]

    def cell_to_pixel(self, row: int, col: int) -> tuple[float, float]:
        return self.origin_x + col * self.cell_w, self.origin_y + row * self.cell_h

    @property
    def peak(self) -> float:
        return float(self.data.max())


def gaussian_label(grid_w: int, grid_h: int, sigma: float) -> LabelMap:
    """2-D Gaussian with value 1 at the center cell (floor(w/2), floor(h/2))."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    cy, cx = grid_h // 2, grid_w // 2
    ys, xs = np.ogrid[0:grid_h, 0:grid_w]
    d2 = (ys - cy) ** 2 + (xs - cx) ** 2
    return LabelMap(np.exp(-d2 / (2.0 * sigma * sigma)), sigma)


def default_label_sigma(grid_w: int, grid_h: int) -> float:
    return np.sqrt(grid_w * grid_h) / 10.0


def hann_window(grid_w: int, grid_h: int) -> np.ndarray:
    """Outer product of 1-D Hann windows; all-ones along length-1 axes."""
    if grid_w < 1 or grid_h < 1:
        raise ValueError("window dimensions must be >= 1")
    return np.outer(np.hanning(grid_h), np.hanning(grid_w))


def _check_grids(stack: FeatureStack, label: LabelMap) -> None:
    if (stack.grid_h, stack.grid_w) != (label.grid_h, label.grid_w):
        raise ValueError(
            f"stack grid ({stack.grid_h}, {stack.grid_w}) does not match "
            f"label grid ({label.grid_h}, {label.grid_w})"
        )


def learn_filter(
    stack: FeatureStack, label: LabelMap, lambda_reg: float, eta: float
) -> CorrelationFilter:
    """Fit the closed-form ridge filter to one training sample."""
    if lambda_reg <= 0:
        raise ValueError("lambda_reg must be > 0")
    _check_grids(stack, label)
    spectra = np.fft.fft2(stack.data, axes=(-2, -1))
    target = np.fft.fft2(label.data)
    numerator = np.conj(spectra) * target[None, :, :]
    denominator = (np.conj(spectra) * spectra).sum(axis=0) + lambda_reg
    return CorrelationFilter(numerator, denominator, lambda_reg, eta)


def update_filter(
    filt: CorrelationFilter, stack: FeatureStack, label: LabelMap
) -> CorrelationFilter:
    """Blend in a new sample with rate eta: state <- (1-eta)*state + eta*new.

    The ridge term is part of both denominators, so it stays counted exactly
    once through the recursion.
    """
    if stack.channels != filt.channels:
        raise ValueError(
            f"channel count changed: filter has {filt.channels}, "
            f"sample has {stack.channels}"
        )
    _check_grids(stack, label)
    if filt.eta == 0.0:
        return replace(filt, numerator=filt.numerator.copy(), denominator=filt.denominator.copy())
    new = learn_filter(stack, label, filt.lambda_reg, filt.eta)
    if filt.eta == 1.0:
        return new
    keep = 1.0 - filt.eta
    return CorrelationFilter(
        keep * filt.numerator + filt.eta * new.numerator,
        keep * filt.denominator + filt.eta * new.denominator,
        filt.lambda_reg,
        filt.eta,
    )


def correlate(
    filt: CorrelationFilter,
    stack: FeatureStack,
    cell_w: float | None = None,
    cell_h: float | None = None,
    origin_x: float = 0.0,
    origin_y: float = 0.0,
) -> ResponseMap:
    """Score a query stack against the filter.

    A query equal to the training sample peaks at the label center, and a
    circular shift of the query shifts the peak by the same amount. The
    tiny imaginary residue of the inverse transform is discarded.
    """
    if stack.channels != filt.channels:
        raise ValueError(
            f"channel count mismatch: filter {filt.channels}, query {stack.channels}"
        )
    if (stack.grid_h, stack.grid_w) != filt.grid_shape:
        raise ValueError(
            f"grid mismatch: filter {filt.grid_shape}, "
            f"query ({stack.grid_h}, {stack.grid_w})"
        )
    spectra = np.fft.fft2(stack.data, axes=(-2, -1))
    response_hat = (filt.numerator / filt.denominator[None, :, :] * spectra).sum(axis=0)
    response = np.fft.ifft2(response_hat).real
    return ResponseMap(
        response,
        cell_w=float(stack.cell_size if cell_w is None else cell_w),
        cell_h=float(stack.cell_size if cell_h is None else cell_h),
        origin_x=origin_x,
        origin_y=origin_y,
    )


def cross_correlate(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Circular cross-correlation via the FFT.

    out[k] = sum_x a(x) * b(x + k), indices wrapping modulo the grid.
    """
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return np.fft.ifft2(np.conj(np.fft.fft2(a)) * np.fft.fft2(b)).real
