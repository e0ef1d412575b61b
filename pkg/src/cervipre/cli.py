"""Command-line interface: process cervigrams, generate synthetic data, evaluate.

Exit codes: 0 on success, 1 when any per-image failure occurred, 2 on
invalid arguments or configuration.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .imageio import load_mask, save_image, save_mask
from .inpaint import HarmonicSolverConfig
from .pipeline import PipelineConfig, process_batch, summarize_classifications
from .roi import DetectionClass, classify_detection
from .specular import SpecularConfig
from .synthetic import SyntheticSpec, generate_synthetic

GROUPS_FILENAME = "groups.json"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cervipre",
        description="Specular-glare removal and cervix ROI extraction for cervigrams.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("process", help="inpaint glare and extract the ROI for each image")
    p.add_argument("inputs", nargs="+", help="input image files (PNG or JPEG)")
    p.add_argument("--out", required=True, help="output directory for artifacts")
    p.add_argument("--threshold", type=float, default=0.90, help="white threshold in (0,1]")
    p.add_argument("--se-radius", type=int, default=2, help="glare dilation radius in pixels")
    p.add_argument("--k", type=int, default=2, help="number of color clusters")
    p.add_argument("--seed", type=int, default=42, help="clustering seed")
    p.add_argument("--tol", type=float, default=1e-4, help="solver residual tolerance")
    p.add_argument("--max-iters", type=int, default=10_000, help="solver iteration cap")
    p.add_argument("--omega", type=float, default=1.8, help="SOR relaxation factor in (0,2)")
    p.add_argument("--json", action="store_true", help="print a JSON array of reports to stdout")
    p.add_argument("--timings", action="store_true", help="include per-stage timings in reports")

    s = sub.add_parser("synth", help="generate synthetic cervigrams with truth masks")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--count", type=int, required=True, help="number of images")
    s.add_argument("--seed", type=int, required=True, help="seed of the first image")
    s.add_argument("--speckles", type=int, default=12, help="glare speckles per image")
    s.add_argument("--speckle-size", type=int, default=3, help="speckle square side in pixels")
    s.add_argument("--width", type=int, default=512)
    s.add_argument("--height", type=int, default=512)
    s.add_argument("--ellipse-ax", type=float, default=0.32, help="relative semi-axis (x)")
    s.add_argument("--ellipse-ay", type=float, default=0.27, help="relative semi-axis (y)")
    s.add_argument("--group", default="normal", help="group tag recorded in groups.json")

    e = sub.add_parser("eval", help="classify predicted ROI masks against truth masks")
    e.add_argument("--pred", required=True, help="directory of predicted <stem>.roimask.png")
    e.add_argument("--truth", required=True, help="directory of truth <stem>.roimask.png")
    e.add_argument("--groups", required=True, help="JSON file mapping image stem -> group tag")
    e.add_argument("--slack", type=float, default=0.10, help="area-ratio slack in (0,1)")
    return parser


def _cmd_process(args: argparse.Namespace) -> int:
    cfg = PipelineConfig(
        specular=SpecularConfig(white_threshold=args.threshold, se_radius=args.se_radius),
        solver=HarmonicSolverConfig(
            tolerance=args.tol,
            max_iterations=args.max_iters,
            relaxation_factor=args.omega,
        ),
        k=args.k,
        seed=args.seed,
    )
    results = process_batch(args.inputs, args.out, cfg, include_timings=args.timings)

    if args.json:
        docs = []
        for r in results:
            if r.ok:
                docs.append(r.report.to_json_dict(include_timings=args.timings))
            else:
                docs.append({"input_path": r.input_path, "error": r.error})
        print(json.dumps(docs, indent=2))
    else:
        for r in results:
            if r.ok:
                bbox = r.report.roi.bbox
                print(
                    f"ok {r.input_path} glare={r.report.specular_pixel_count}px "
                    f"roi=({bbox.x0},{bbox.y0})-({bbox.x1},{bbox.y1})"
                )
            else:
                print(f"failed {r.input_path}: {r.error}", file=sys.stderr)
    return 1 if any(not r.ok for r in results) else 0


def _find_mask(directory: Path, stem: str) -> Path | None:
    for name in (f"{stem}.roimask.png", f"{stem}.png"):
        candidate = directory / name
        if candidate.is_file():
            return candidate
    return None


def _cmd_synth(args: argparse.Namespace) -> int:
    spec = SyntheticSpec(
        width=args.width,
        height=args.height,
        ellipse_axes=(args.ellipse_ax, args.ellipse_ay),
        speckle_count=args.speckles,
        speckle_size=args.speckle_size,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    groups_path = out / GROUPS_FILENAME
    groups = json.loads(groups_path.read_text()) if groups_path.is_file() else {}
    for i in range(args.count):
        seed = args.seed + i
        img, glare, roi = generate_synthetic(seed, spec)
        stem = f"synth_{seed:04d}"
        save_image(img, out / f"{stem}.png")
        save_mask(glare, out / f"{stem}.glaremask.png")
        save_mask(roi, out / f"{stem}.roimask.png")
        groups[stem] = args.group
        print(f"wrote {out / stem}.png")
    groups_path.write_text(json.dumps(groups, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    if not 0.0 < args.slack < 1.0:
        raise ValueError("slack must lie in (0, 1)")
    groups = json.loads(Path(args.groups).read_text())
    if not isinstance(groups, dict) or not groups:
        raise ValueError("groups file must be a nonempty JSON object of stem -> group")
    pred_dir, truth_dir = Path(args.pred), Path(args.truth)
    tagged: list[tuple[str, DetectionClass | None]] = []
    failures = 0
    for stem, group in groups.items():
        try:
            pred_path = _find_mask(pred_dir, stem)
            truth_path = _find_mask(truth_dir, stem)
            if pred_path is None or truth_path is None:
                raise FileNotFoundError(f"missing mask for stem {stem!r}")
            detection = classify_detection(
                load_mask(pred_path), load_mask(truth_path), slack=args.slack
            )
            tagged.append((group, detection))
        except Exception as exc:
            print(f"failed {stem}: {exc}", file=sys.stderr)
            tagged.append((group, None))
            failures += 1
    summary = summarize_classifications(tagged)
    print(json.dumps(summary.to_json_dict(), indent=2))
    return 1 if failures else 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "process":
            return _cmd_process(args)
        if args.command == "synth":
            return _cmd_synth(args)
        return _cmd_eval(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
