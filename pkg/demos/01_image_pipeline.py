"""Walk through the pixel substrate: decoding, cropping and resizing.

Every other capability sits on these three operations, so this demo shows
their contracts on tiny arrays you can check by eye.
"""

import numpy as np

from saltrack import BoundingBox, decode_image, encode_gray_png, extract_patch, resize_bilinear

print("=== decode / encode round trip ===")
ramp = np.linspace(0.0, 1.0, 16).reshape(4, 4)
recovered = decode_image(encode_gray_png(ramp))
print("max 8-bit quantization error:", np.abs(recovered - ramp).max())

print()
print("=== patch extraction with edge replication ===")
img = np.arange(9, dtype=float).reshape(3, 3)
print("source plane:")
print(img)
print("crop one pixel past the right edge (the last column repeats):")
print(extract_patch(img, BoundingBox(1, 0, 3, 3)))

print()
print("=== fractional boxes rasterize half-up ===")
print("box (0.5, 0.5, 2.4, 2.5) becomes the integer window:")
print(extract_patch(img, BoundingBox(0.5, 0.5, 2.4, 2.5)))

print()
print("=== bilinear resize with half-pixel centers ===")
two = np.array([[0.0, 1.0], [0.0, 1.0]])
print("2x2 column step upsampled to 4x4:")
print(resize_bilinear(two, 4, 4))
print("a constant plane stays constant at any size:")
print(resize_bilinear(np.full((2, 2), 0.3), 5, 3))
