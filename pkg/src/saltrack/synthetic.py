"""Synthetic sequences for demos, benchmarks and tests."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .imaging import BoundingBox, encode_gray_png


def square_sequence(
    n_frames: int = 60,
    frame_size: tuple[int, int] = (64, 64),
    square: int = 12,
    start: tuple[int, int] = (10, 26),
    velocity: tuple[int, int] = (2, 1),
    noise_sigma: float = 0.05,
    value: float = 1.0,
    seed: int = 0,
) -> tuple[list[np.ndarray], list[BoundingBox]]:
    """A bright square gliding over Gaussian noise, bouncing off the borders.

    Returns per-frame [0, 1] planes and the matching ground-truth boxes.
    """
    h, w = frame_size
    rng = np.random.default_rng(seed)
    x, y = start
    vx, vy = velocity
    frames = []
    boxes = []
    for _ in range(n_frames):
        canvas = rng.normal(0.0, noise_sigma, size=(h, w))
        canvas[y : y + square, x : x + square] += value
        frames.append(np.clip(canvas, 0.0, 1.0))
        boxes.append(BoundingBox(float(x), float(y), float(square), float(square)))
        x += vx
        y += vy
        if x < 0 or x > w - square:
            vx = -vx
            x += 2 * vx
        if y < 0 or y > h - square:
            vy = -vy
            y += 2 * vy
    return frames, boxes


def write_sequence(
    directory: str | Path,
    frames: list[np.ndarray],
    boxes: list[BoundingBox],
    attributes: tuple[str, ...] = (),
) -> Path:
    """Write a sequence in the benchmark's on-disk layout.

    Frames become img/%04d.png (numbered from 1), ground truth is written
    1-based as groundtruth_rect.txt, and attributes.txt is emitted when tags
    are given.
    """
    directory = Path(directory)
    img_dir = directory / "img"
    img_dir.mkdir(parents=True, exist_ok=True)
    for i, frame in enumerate(frames, start=1):
        (img_dir / f"{i:04d}.png").write_bytes(encode_gray_png(frame))
    lines = [f"{b.x + 1:g},{b.y + 1:g},{b.w:g},{b.h:g}" for b in boxes]
    (directory / "groundtruth_rect.txt").write_text("\n".join(lines) + "\n")
    if attributes:
        (directory / "attributes.txt").write_text("\n".join(attributes) + "\n")
    return directory


def write_square_dataset(root: str | Path, n_sequences: int = 1, **kwargs) -> Path:
    """Materialize `n_sequences` square sequences under `root`."""
    root = Path(root)
    base_seed = kwargs.pop("seed", 0)
    for i in range(n_sequences):
        frames, boxes = square_sequence(seed=base_seed + i, **kwargs)
        write_sequence(root / f"square{i:02d}", frames, boxes)
    return root
