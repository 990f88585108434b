"""Command-line interface.

Subcommands: ``partition`` one clump, ``synth`` a synthetic corpus,
``batch`` a directory of cases, and ``validate`` (batch plus ground-truth
evaluation). Case directories hold a ``case.yaml`` manifest naming the
mask/boundary, seeds, and optional image and truth rasters.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

import numpy as np
import yaml

from . import fileio, geom, harness, pipeline


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="declump",
        description="Partition clumped regions into one region per seed.")
    sub = parser.add_subparsers(required=True)

    part = sub.add_parser("partition", help="partition one clump")
    src = part.add_mutually_exclusive_group(required=True)
    src.add_argument("--boundary", help="YAML polygon file (vertices: ...)")
    src.add_argument("--mask", help="labeled raster (PGM)")
    part.add_argument("--label", type=int, default=1,
                      help="label to trace in --mask (default 1)")
    part.add_argument("--seeds", required=True,
                      help="YAML seeds file (seeds: ...)")
    part.add_argument("--image", help="grayscale intensity image")
    part.add_argument("--config", help="YAML config file")
    part.add_argument("--out", required=True, help="output directory")
    part.add_argument("--svg", action="store_true",
                      help="write overlay.svg")
    part.add_argument("--emit-mask", action="store_true",
                      help="write labels.pgm (16-bit)")
    part.set_defaults(func=_cmd_partition)

    synth = sub.add_parser("synth", help="generate synthetic cases")
    synth.add_argument("--n", type=int, required=True,
                       help="number of cases")
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--rng-seed", type=int, default=42)
    synth.add_argument("--min-objects", type=int, default=2)
    synth.add_argument("--max-objects", type=int, default=5)
    synth.set_defaults(func=_cmd_synth)

    for name, evaluate in (("batch", False), ("validate", True)):
        cmd = sub.add_parser(
            name, help=("partition a directory of cases"
                        + (" and evaluate against truth" if evaluate else "")))
        cmd.add_argument("--cases", required=True,
                         help="directory of case subdirectories")
        cmd.add_argument("--out", required=True, help="output directory")
        cmd.add_argument("--config", help="YAML config file")
        cmd.add_argument("--jobs", type=int, default=1)
        cmd.add_argument("--svg", action="store_true")
        cmd.add_argument("--emit-mask", action="store_true")
        cmd.set_defaults(func=_cmd_batch, evaluate=evaluate)

    return parser


def _load_config(path) -> pipeline.Config:
    return fileio.load_config_file(path) if path else pipeline.Config()


def _cmd_partition(args) -> int:
    config = _load_config(args.config)
    shape = None
    if args.mask:
        mask = fileio.read_pgm(args.mask)
        boundary = geom.boundary_from_mask(
            mask, args.label, curvature_window=config.curvature_window,
            smooth_sigma=config.curvature_smooth_sigma)
        shape = mask.shape
    else:
        boundary = geom.prepare_boundary(
            fileio.load_boundary_file(args.boundary),
            curvature_window=config.curvature_window,
            smooth_sigma=config.curvature_smooth_sigma)
    seeds = fileio.load_seeds_file(args.seeds)
    image = fileio.read_intensity(args.image) if args.image else None

    result = pipeline.partition_clump(boundary, seeds, image=image,
                                      config=config, shape=shape)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fileio.write_cuts_document(out / "cuts.json", result, config)
    if args.emit_mask:
        fileio.write_pgm(out / "labels.pgm",
                         result.region_map.astype(np.uint16), maxval=65535)
    if args.svg:
        fileio.write_svg(out / "overlay.svg", boundary, result, seeds)
    print(f"{result.region_count} regions, {len(result.cuts)} cuts "
          f"-> {out}")
    return 0


def _cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.n):
        seq = np.random.SeedSequence(entropy=args.rng_seed, spawn_key=(i,))
        rng = np.random.default_rng(seq)
        n_obj = int(rng.integers(args.min_objects, args.max_objects + 1))
        case = harness.generate_clump(seq, n_objects=n_obj)
        case.case_id = f"case-{i:05d}"
        _write_case(out / case.case_id, case)
    print(f"wrote {args.n} cases -> {out}")
    return 0


def _write_case(case_dir: Path, case: harness.ClumpCase) -> None:
    case_dir.mkdir(parents=True, exist_ok=True)
    manifest = {"id": case.case_id, "label": int(case.label),
                "mask": "mask.pgm", "seeds": "seeds.yaml"}
    fileio.write_pgm(case_dir / "mask.pgm", case.mask.astype(np.uint8),
                     maxval=255)
    seeds_doc = {"seeds": [[float(x), float(y)] for x, y in case.seeds]}
    (case_dir / "seeds.yaml").write_text(
        yaml.safe_dump(seeds_doc, sort_keys=True), encoding="utf-8")
    if case.image is not None:
        manifest["image"] = "image.pgm"
        quant = np.round(np.asarray(case.image, float) * 65535)
        fileio.write_pgm(case_dir / "image.pgm", quant.astype(np.uint16),
                         maxval=65535)
    if case.truth is not None:
        manifest["truth"] = "truth.pgm"
        fileio.write_pgm(case_dir / "truth.pgm",
                         case.truth.astype(np.uint16), maxval=65535)
    (case_dir / "case.yaml").write_text(
        yaml.safe_dump(manifest, sort_keys=True), encoding="utf-8")


def load_case_dir(case_dir) -> harness.ClumpCase:
    """Read one case directory via its ``case.yaml`` manifest."""
    case_dir = Path(case_dir)
    with open(case_dir / "case.yaml", "r", encoding="utf-8") as fh:
        manifest = yaml.safe_load(fh)
    seeds = fileio.load_seeds_file(case_dir / manifest["seeds"])
    case = harness.ClumpCase(case_id=str(manifest.get("id", case_dir.name)),
                             seeds=seeds, label=int(manifest.get("label", 1)))
    if "mask" in manifest:
        case.mask = fileio.read_pgm(case_dir / manifest["mask"])
    elif "boundary" in manifest:
        case.boundary = fileio.load_boundary_file(
            case_dir / manifest["boundary"])
    else:
        raise ValueError(f"{case_dir}: manifest needs 'mask' or 'boundary'")
    if manifest.get("image"):
        case.image = fileio.read_intensity(
            case_dir / manifest["image"]).values
    if manifest.get("truth"):
        case.truth = fileio.read_pgm(case_dir / manifest["truth"])
    return case


def _cmd_batch(args) -> int:
    config = _load_config(args.config)
    case_dirs = sorted(p.parent for p in Path(args.cases).glob("*/case.yaml"))
    if not case_dirs:
        print(f"no cases under {args.cases}", file=sys.stderr)
        return 2
    cases = [load_case_dir(d) for d in case_dirs]
    if not args.evaluate:
        for case in cases:
            case.truth = None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def consumer(case, result, verdict):
        case_out = out / case.case_id
        case_out.mkdir(parents=True, exist_ok=True)
        if result is None:
            (case_out / "error.txt").write_text(verdict.error + "\n",
                                                encoding="utf-8")
            return
        fileio.write_cuts_document(case_out / "cuts.json", result, config)
        if args.emit_mask:
            fileio.write_pgm(case_out / "labels.pgm",
                             result.region_map.astype(np.uint16),
                             maxval=65535)
        if args.svg:
            boundary = geom.boundary_from_mask(
                case.mask, case.label,
                curvature_window=config.curvature_window,
                smooth_sigma=config.curvature_smooth_sigma)
            fileio.write_svg(case_out / "overlay.svg", boundary, result,
                             case.seeds)

    report = harness.run_batch(cases, config=config, jobs=args.jobs,
                               consumer=consumer)
    fileio.write_report(out / "report.json", _report_dict(report))
    fileio.write_report(out / "timings.json",
                        {"runtime_s": round(report.runtime_s, 3)})
    print(report.summary())
    return 0


def _report_dict(report: harness.EvalReport) -> dict:
    verdicts = [
        {k: v for k, v in dataclasses.asdict(verdict).items()
         if v is not None}
        for verdict in report.verdicts
    ]
    doc = {"total": report.total, "evaluated": report.evaluated,
           "correct": report.correct, "verdicts": verdicts}
    if report.fraction is not None:
        doc["fraction"] = round(report.fraction, 6)
        doc["fraction_display"] = f"{report.fraction:.3f}"
    return doc


if __name__ == "__main__":
    sys.exit(main())
