"""Command-line interface: track a sequence, run a benchmark, score results.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import (
    PROTOCOLS,
    auc,
    iou,
    load_dataset,
    load_sequence,
    parse_groundtruth_line,
    run_protocol,
    success_curve,
)
from .errors import DatasetError, DecodeError, InvalidBoxError, InvalidInputError
from .imaging import BoundingBox, decode_image
from .tracker import FusionConfig, make_provider, parse_config, track_sequence

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the CLI reserves 2 for data errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _load_config(path: str | None) -> FusionConfig:
    if path is None:
        return FusionConfig()
    return parse_config(path)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_track(args) -> int:
    cfg = _load_config(args.config)
    seq = load_sequence(args.sequence_dir)
    provider = make_provider(cfg, seq.path)
    frames = (decode_image(p.read_bytes()) for p in seq.frame_paths)
    boxes, diagnostics = track_sequence(frames, seq.boxes[0], cfg, provider)
    lines = ["frame,x,y,w,h,sim,w_t"]
    for box, diag in zip(boxes, diagnostics):
        lines.append(
            f"{diag.frame},{box.x:.4f},{box.y:.4f},{box.w:.4f},{box.h:.4f},"
            f"{diag.sim:.6f},{diag.w:.8f}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_bench(args) -> int:
    cfg = _load_config(args.config)
    dataset = load_dataset(args.dataset_dir)
    report = run_protocol(args.protocol.upper(), dataset, cfg)
    _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
    return 0


def _read_result_boxes(path: str) -> list[BoundingBox]:
    boxes = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("frame,"):
            continue
        parts = line.split(",")
        if len(parts) < 5:
            raise DatasetError(f"malformed result line {line!r}")
        x, y, w, h = (float(p) for p in parts[1:5])
        boxes.append(BoundingBox(x, y, w, h))
    if not boxes:
        raise DatasetError(f"{path} holds no result rows")
    return boxes


def _cmd_eval(args) -> int:
    results = _read_result_boxes(args.results)
    truth_lines = [ln for ln in Path(args.truth).read_text().splitlines() if ln.strip()]
    truth = [parse_groundtruth_line(ln) for ln in truth_lines]
    if len(results) != len(truth):
        raise DatasetError(
            f"{len(results)} result boxes but {len(truth)} ground-truth boxes"
        )
    curve = success_curve([iou(r, g) for r, g in zip(results, truth)])
    print(f"auc,{auc(curve):.6f}")
    print("threshold,success_rate")
    for t, r in zip(curve.thresholds, curve.rates):
        print(f"{t:.2f},{r:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="saltrack", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_track = sub.add_parser("track", help="track one sequence, emit per-frame CSV")
    p_track.add_argument("sequence_dir")
    p_track.add_argument("--config", help="flat key=value tracker config file")
    p_track.add_argument("--out", help="CSV path (default: stdout)")
    p_track.set_defaults(fn=_cmd_track)

    p_bench = sub.add_parser("bench", help="run a protocol over a dataset directory")
    p_bench.add_argument("dataset_dir")
    p_bench.add_argument(
        "--protocol", required=True, choices=[p.lower() for p in PROTOCOLS]
    )
    p_bench.add_argument("--config", help="flat key=value tracker config file")
    p_bench.add_argument("--out", help="report JSON path (default: stdout)")
    p_bench.set_defaults(fn=_cmd_bench)

    p_eval = sub.add_parser("eval", help="score a result CSV against ground truth")
    p_eval.add_argument("--results", required=True, help="boxes.csv from `track`")
    p_eval.add_argument("--truth", required=True, help="groundtruth_rect.txt")
    p_eval.set_defaults(fn=_cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (DatasetError, DecodeError, InvalidBoxError, InvalidInputError, OSError) as exc:
        print(f"saltrack: error: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
