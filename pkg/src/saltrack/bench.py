"""Dataset loading, overlap metrics, and the OPE/SRE/TRE protocols."""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DatasetError
from .imaging import BoundingBox, decode_image
from .tracker import FusionConfig, config_hash, make_provider, track_sequence

ATTRIBUTE_TAGS = frozenset(
    "IV OPR SV OC D MB FM IPR LR BC OV AR FO PO CM SO VC".split()
)
PROTOCOLS = ("OPE", "SRE", "TRE")

SHIFT_FRACTION = 0.1
SCALE_VARIATIONS = (0.8, 0.9, 1.1, 1.2)
TRE_SEGMENTS = 20

THRESHOLDS = tuple(round(0.05 * i, 2) for i in range(21))

# A run function maps (sequence, start frame, init box, config) to one box per
# frame from the start frame to the end of the sequence.
RunFn = Callable[["SequenceRecord", int, BoundingBox, FusionConfig], list[BoundingBox]]


@dataclass
class SequenceRecord:
    name: str
    path: Path
    frame_paths: list[Path]
    boxes: list[BoundingBox]
    attributes: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.frame_paths)


@dataclass
class SuccessCurve:
    thresholds: tuple[float, ...]
    rates: tuple[float, ...]


@dataclass
class SequenceResult:
    name: str
    auc: float
    runs: list[float]  # per-run AUCs


@dataclass
class EvalReport:
    protocol: str
    overall_auc: float
    per_sequence: list[SequenceResult]
    per_attribute: dict[str, float]
    config_hash: str
    fps: float
    n_runs: int = 0

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "overall_auc": self.overall_auc,
            "per_sequence": [
                {"name": s.name, "auc": s.auc, "runs": len(s.runs)}
                for s in self.per_sequence
            ],
            "per_attribute": dict(sorted(self.per_attribute.items())),
            "config_hash": self.config_hash,
            "fps": self.fps,
        }


def _frame_sort_key(path: Path):
    digits = re.findall(r"\d+", path.stem)
    return (int(digits[-1]) if digits else 0, path.name)


def parse_groundtruth_line(line: str) -> BoundingBox:
    """Parse one 'x,y,w,h' line (comma, tab or space separated, 1-based)."""
    parts = [p for p in re.split(r"[,\t ]+", line.strip()) if p]
    if len(parts) != 4:
        raise DatasetError(f"expected 4 fields in ground-truth line, got {line!r}")
    x, y, w, h = (float(p) for p in parts)
    return BoundingBox(x - 1.0, y - 1.0, w, h)


def load_sequence(directory: str | Path) -> SequenceRecord:
    """Load one sequence: img/ frames, groundtruth_rect.txt, attributes.txt.

    Ground-truth coordinates are 1-based on disk and converted to 0-based.
    """
    directory = Path(directory)
    img_dir = directory / "img"
    if not img_dir.is_dir():
        raise DatasetError(f"{directory} has no img/ directory")
    frames = sorted(
        (p for p in img_dir.iterdir() if p.suffix.lower() in (".png", ".jpg", ".jpeg")),
        key=_frame_sort_key,
    )
    if not frames:
        raise DatasetError(f"{img_dir} contains no frames")

    gt_path = directory / "groundtruth_rect.txt"
    if not gt_path.is_file():
        raise DatasetError(f"{directory} has no groundtruth_rect.txt")
    lines = [ln for ln in gt_path.read_text().splitlines() if ln.strip()]
    if len(lines) != len(frames):
        raise DatasetError(
            f"{directory.name}: {len(frames)} frames but {len(lines)} ground-truth lines"
        )
    try:
        boxes = [parse_groundtruth_line(ln) for ln in lines]
    except ValueError as exc:
        raise DatasetError(f"{directory.name}: {exc}") from exc

    attributes: tuple[str, ...] = ()
    attr_path = directory / "attributes.txt"
    if attr_path.is_file():
        tags = [t.strip() for t in attr_path.read_text().splitlines() if t.strip()]
        unknown = [t for t in tags if t not in ATTRIBUTE_TAGS]
        if unknown:
            raise DatasetError(f"{directory.name}: unknown attribute tags {unknown}")
        attributes = tuple(tags)

    return SequenceRecord(directory.name, directory, frames, boxes, attributes)


def load_dataset(directory: str | Path) -> list[SequenceRecord]:
    """Load every sequence subdirectory (sorted by name)."""
    directory = Path(directory)
    seq_dirs = sorted(d for d in directory.iterdir() if (d / "img").is_dir())
    if not seq_dirs:
        raise DatasetError(f"{directory} contains no sequence directories")
    records = []
    for d in seq_dirs:
        try:
            records.append(load_sequence(d))
        except DatasetError as exc:
            raise DatasetError(f"sequence {d.name!r}: {exc}") from exc
    return records


def _mean(values) -> float:
    # Running mean: exact on constant inputs, which protocol averaging
    # (and the perfect-tracker AUC identity) relies on.
    m = 0.0
    for k, v in enumerate(values, start=1):
        m += (v - m) / k
    return m


def iou(t: BoundingBox, gt: BoundingBox) -> float:
    """Intersection area over union area; 0 for disjoint boxes."""
    left = max(t.x, gt.x)
    top = max(t.y, gt.y)
    right = min(t.x + t.w, gt.x + gt.w)
    bottom = min(t.y + t.h, gt.y + gt.h)
    inter = max(0.0, right - left) * max(0.0, bottom - top)
    if inter == 0.0:
        return 0.0
    return inter / (t.w * t.h + gt.w * gt.h - inter)


def success_curve(overlaps) -> SuccessCurve:
    """Fraction of frames whose overlap strictly exceeds each threshold."""
    overlaps = np.asarray(list(overlaps), dtype=np.float64)
    if overlaps.size == 0:
        raise DatasetError("cannot build a success curve from zero frames")
    rates = tuple(float(np.mean(overlaps > t)) for t in THRESHOLDS)
    return SuccessCurve(THRESHOLDS, rates)


def auc(curve: SuccessCurve) -> float:
    """Area under the success curve: the mean of the 21 rates."""
    return _mean(curve.rates)


def sre_perturbations(box: BoundingBox) -> list[BoundingBox]:
    """The 12 perturbed initializations: 4 axis shifts, 4 corner shifts and 4
    center-preserving rescales (0.8, 0.9, 1.1, 1.2); shifts are 10% of size."""
    dx = SHIFT_FRACTION * box.w
    dy = SHIFT_FRACTION * box.h
    shifted = [
        BoundingBox(box.x + dx, box.y, box.w, box.h),
        BoundingBox(box.x - dx, box.y, box.w, box.h),
        BoundingBox(box.x, box.y + dy, box.w, box.h),
        BoundingBox(box.x, box.y - dy, box.w, box.h),
        BoundingBox(box.x + dx, box.y + dy, box.w, box.h),
        BoundingBox(box.x + dx, box.y - dy, box.w, box.h),
        BoundingBox(box.x - dx, box.y + dy, box.w, box.h),
        BoundingBox(box.x - dx, box.y - dy, box.w, box.h),
    ]
    scaled = [box.scaled(s) for s in SCALE_VARIATIONS]
    return shifted + scaled


def tre_segments(n_frames: int) -> list[int]:
    """Deduplicated start indices floor(i * n / 20) for i in 0..19."""
    if n_frames < 1:
        raise DatasetError("sequence must have at least one frame")
    return sorted({i * n_frames // TRE_SEGMENTS for i in range(TRE_SEGMENTS)})


def _default_run(
    seq: SequenceRecord, start: int, init_box: BoundingBox, cfg: FusionConfig
) -> list[BoundingBox]:
    provider = make_provider(cfg, seq.path)
    frames = (decode_image(p.read_bytes()) for p in seq.frame_paths[start:])
    boxes, _ = track_sequence(frames, init_box, cfg, provider, frame_index_base=start)
    return boxes


def _run_plan(protocol: str, seq: SequenceRecord) -> list[tuple[int, BoundingBox]]:
    if protocol == "OPE":
        return [(0, seq.boxes[0])]
    if protocol == "SRE":
        return [(0, p) for p in sre_perturbations(seq.boxes[0])]
    if protocol == "TRE":
        return [(s, seq.boxes[s]) for s in tre_segments(len(seq))]
    raise DatasetError(f"unknown protocol {protocol!r}; expected one of {PROTOCOLS}")


def run_protocol(
    protocol: str,
    dataset: list[SequenceRecord],
    cfg: FusionConfig = FusionConfig(),
    run_fn: RunFn | None = None,
) -> EvalReport:
    """Evaluate a tracker over a dataset under OPE, SRE or TRE.

    OPE runs once per sequence from the first frame's ground truth. SRE runs
    the 12 perturbed initializations from the first frame. TRE runs once per
    segment start. A sequence's AUC is the mean of its run AUCs; the overall
    AUC averages over all sequences, tagged or not, while per-attribute AUCs
    average only the sequences carrying each tag.
    """
    protocol = protocol.upper()
    if protocol not in PROTOCOLS:
        raise DatasetError(f"unknown protocol {protocol!r}; expected one of {PROTOCOLS}")
    if not dataset:
        raise DatasetError("dataset is empty")
    run = run_fn if run_fn is not None else _default_run

    results: list[SequenceResult] = []
    total_frames = 0
    started = time.perf_counter()
    for seq in dataset:
        run_aucs = []
        for start, init_box in _run_plan(protocol, seq):
            boxes = run(seq, start, init_box, cfg)
            truth = seq.boxes[start:]
            if len(boxes) != len(truth):
                raise DatasetError(
                    f"sequence {seq.name!r}: run produced {len(boxes)} boxes "
                    f"for {len(truth)} frames"
                )
            overlaps = [iou(b, g) for b, g in zip(boxes, truth)]
            run_aucs.append(auc(success_curve(overlaps)))
            total_frames += len(boxes)
        results.append(SequenceResult(seq.name, _mean(run_aucs), run_aucs))
    elapsed = time.perf_counter() - started

    per_attribute: dict[str, float] = {}
    for tag in sorted({t for seq in dataset for t in seq.attributes}):
        tagged = [r.auc for r, seq in zip(results, dataset) if tag in seq.attributes]
        per_attribute[tag] = _mean(tagged)

    return EvalReport(
        protocol=protocol,
        overall_auc=_mean([r.auc for r in results]),
        per_sequence=results,
        per_attribute=per_attribute,
        config_hash=config_hash(cfg),
        fps=(total_frames / elapsed) if elapsed > 0 else float("inf"),
        n_runs=sum(len(r.runs) for r in results),
    )
