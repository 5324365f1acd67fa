"""Image decoding, patch extraction and bilinear resizing.

Planes are 2-D float64 arrays in [0, 1], row-major (shape = (height, width)).
Color images decode to (height, width, 3) on request.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import DecodeError, InvalidBoxError, InvalidInputError

# ITU-R 601 luma weights for grayscale conversion.
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned region in pixel units; (x, y) is the top-left corner."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        for v in (self.x, self.y, self.w, self.h):
            if not math.isfinite(v):
                raise InvalidBoxError(f"non-finite box field: {self!r}")
        if self.w <= 0 or self.h <= 0:
            raise InvalidBoxError(f"box must have positive size, got {self!r}")

    @property
    def cx(self) -> float:
        return self.x + self.w / 2.0

    @property
    def cy(self) -> float:
        return self.y + self.h / 2.0

    def scaled(self, factor: float) -> "BoundingBox":
        """Rescale width and height by `factor`, preserving the center."""
        nw = self.w * factor
        nh = self.h * factor
        return BoundingBox(self.cx - nw / 2.0, self.cy - nh / 2.0, nw, nh)


def round_half_up(v: float) -> int:
    return int(math.floor(v + 0.5))


def rasterize_box(box: BoundingBox) -> tuple[int, int, int, int]:
    """Round a box to integer pixel bounds (half-up). Returns (x, y, w, h)."""
    x = round_half_up(box.x)
    y = round_half_up(box.y)
    w = round_half_up(box.w)
    h = round_half_up(box.h)
    if w <= 0 or h <= 0:
        raise InvalidBoxError(f"box rounds to non-positive size: {box!r}")
    return x, y, w, h


def decode_image(data: bytes, color: bool = False) -> np.ndarray:
    """Decode a PNG or JPEG payload to a [0, 1] float plane.

    Grayscale by default; with ``color=True`` returns an (h, w, 3) RGB array.
    Color input is reduced to grayscale with the 0.299/0.587/0.114 luma weights.
    """
    try:
        img = Image.open(io.BytesIO(data))
        img.load()
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise DecodeError(f"image decode failed: {exc}") from exc
    if color:
        return np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
    if img.mode == "L":
        return np.asarray(img, dtype=np.float64) / 255.0
    rgb = np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
    return rgb @ LUMA_WEIGHTS


def encode_gray_png(plane: np.ndarray) -> bytes:
    """Encode a [0, 1] plane as 8-bit grayscale PNG (values x 255, half-up)."""
    u8 = np.clip(np.floor(np.asarray(plane, dtype=np.float64) * 255.0 + 0.5), 0, 255)
    buf = io.BytesIO()
    Image.fromarray(u8.astype(np.uint8), mode="L").save(buf, format="PNG")
    return buf.getvalue()


def extract_patch(img: np.ndarray, box: BoundingBox) -> np.ndarray:
    """Crop `box` from `img`, replicating edge pixels outside the frame.

    The box is rasterized with half-up rounding first.
    """
    if img.ndim != 2:
        raise InvalidInputError(f"expected a 2-D plane, got shape {img.shape}")
    x, y, w, h = rasterize_box(box)
    rows = np.clip(np.arange(y, y + h), 0, img.shape[0] - 1)
    cols = np.clip(np.arange(x, x + w), 0, img.shape[1] - 1)
    return img[np.ix_(rows, cols)]


def resize_bilinear(img: np.ndarray, out_w: int, out_h: int) -> np.ndarray:
    """Bilinear resize with half-pixel center alignment and edge clamping."""
    if out_w < 1 or out_h < 1:
        raise InvalidInputError(f"output size must be >= 1, got {out_w}x{out_h}")
    h, w = img.shape
    if out_w == w and out_h == h:
        return img.copy()
    src_x = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    src_y = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    x0 = np.floor(src_x).astype(int)
    y0 = np.floor(src_y).astype(int)
    fx = src_x - x0
    fy = src_y - y0
    x0c = np.clip(x0, 0, w - 1)
    x1c = np.clip(x0 + 1, 0, w - 1)
    y0c = np.clip(y0, 0, h - 1)
    y1c = np.clip(y0 + 1, 0, h - 1)
    a = img[np.ix_(y0c, x0c)]
    b = img[np.ix_(y0c, x1c)]
    c = img[np.ix_(y1c, x0c)]
    d = img[np.ix_(y1c, x1c)]
    # Lerp form keeps constant inputs exactly constant.
    top = a + fx[None, :] * (b - a)
    bot = c + fx[None, :] * (d - c)
    return top + fy[:, None] * (bot - top)
