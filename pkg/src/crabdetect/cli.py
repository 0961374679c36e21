"""Command-line entry point: ``crabdetect {detect,train,eval,export-map}``.

Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .classifier import ClassifierModel, fit
from .config import RunConfig, default_config_path
from .errors import CrabDetectError
from .features import write_feature_csv
from .pipeline import evaluate, generate_training_set, run_scene
from .regions import write_regions_jsonl
from .spectral import write_map_csv, write_map_pgm

log = logging.getLogger("crabdetect")

EXIT_IO = 4


def _grid(text):
    parts = text.replace(",", "x").lower().split("x")
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ANGLExDOPPLER, got {text!r}") from None
    if len(dims) == 1:
        dims = dims * 2
    if len(dims) != 2:
        raise argparse.ArgumentTypeError(f"expected ANGLExDOPPLER, got {text!r}")
    return dims


def _load_config(args):
    cfg = RunConfig.load(args.config or default_config_path())
    sc, det = cfg.scenario, cfg.detector
    if getattr(args, "seed", None) is not None and args.command in ("detect", "export-map"):
        sc = sc.replace(rng_seed=args.seed)
    if getattr(args, "grid", None) is not None:
        sc = sc.replace(grid_size=args.grid)
    changes = {}
    if getattr(args, "guard_cols", None) is not None:
        changes["guard_cols"] = args.guard_cols
    if getattr(args, "k_sigma", None) is not None:
        changes["k_sigma"] = args.k_sigma
    if changes:
        det = dataclasses.replace(det, **changes)
    return RunConfig(sc, det, cfg.training)


def _load_model(path, cfg):
    model = ClassifierModel.load(path)
    if model.config_digest and model.config_digest != cfg.digest():
        log.warning("model %s was trained under a different config digest", path)
    return model


def _write_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _export_maps(res, out):
    spec, den = res.spectrum, res.denoised
    write_map_csv(spec.values, spec.angle_axis, spec.doppler_axis, out / "map_raw.csv")
    write_map_pgm(spec.values, out / "map_raw.pgm")
    write_map_csv(den.values, spec.angle_axis, spec.doppler_axis, out / "map_denoised.csv")
    write_map_pgm(den.values, out / "map_denoised.pgm")


def cmd_detect(args):
    cfg = _load_config(args)
    model = _load_model(args.model, cfg) if args.model else None
    res = run_scene(cfg, model)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    model_digest = ""
    if args.model:
        model_digest = hashlib.sha256(Path(args.model).read_bytes()).hexdigest()
    report = res.report(model_digest)
    _write_json(report, out / "report.json")
    _write_json({k: round(v, 3) for k, v in res.timing_ms.items()}, out / "timing.json")
    labels = [d.label for d in res.decisions] if res.decisions else None
    write_feature_csv(res.features, out / "features.csv", labels)
    write_regions_jsonl(res.kept, res.contours, out / "regions.jsonl")
    _export_maps(res, out)
    for row in report["regions"]:
        print(f"region {row['id']}: area={row['area']} cr={row['cr']:.4f} "
              f"eb={row['eb']:.4f} label={row.get('label', '-')}")
    print(f"{len(report['regions'])} region(s) kept, "
          f"{report['discarded_region_count']} discarded; wrote {out}")
    return 0


def cmd_train(args):
    cfg = _load_config(args)
    data = generate_training_set(cfg, args.trials, args.seed, workers=args.workers)
    if data.skipped_trials:
        log.warning("%d trial(s) produced no regions", len(data.skipped_trials))
    model = fit(data.features, data.labels, pooled=cfg.detector.pooled_covariance,
                config_digest=cfg.digest())
    out = Path(args.out)
    if out.parent != Path(""):
        out.parent.mkdir(parents=True, exist_ok=True)
    model.save(out)
    with np.printoptions(precision=6, suppress=False):
        print(f"samples: clutter={model.training_counts[0]} target={model.training_counts[1]} "
              f"(skipped trials: {len(data.skipped_trials)})")
        print(f"m0 (clutter) = {model.m0}")
        print(f"m1 (target)  = {model.m1}")
        print(f"C0 =\n{model.C0}")
        print(f"C1 =\n{model.C1}")
    print(f"wrote {out}")
    return 0


def cmd_eval(args):
    cfg = _load_config(args)
    model = _load_model(args.model, cfg)
    summary = evaluate(cfg, model, args.trials, args.seed, workers=args.workers)
    text = json.dumps(summary, indent=2, sort_keys=True)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return 0


def cmd_export_map(args):
    cfg = _load_config(args)
    res = run_scene(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _export_maps(res, out)
    print(f"wrote maps to {out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="crabdetect",
        description="Clutter-ridge and target detection on angle-Doppler maps.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed_default=None):
        p.add_argument("--config", help="run config JSON (default: bundled scenario)")
        p.add_argument("--seed", type=int, default=seed_default)
        p.add_argument("--grid", type=_grid, help="map size, e.g. 121x121")
        p.add_argument("--guard-cols", type=int, dest="guard_cols")
        p.add_argument("--k-sigma", type=float, dest="k_sigma")

    p = sub.add_parser("detect", help="run one scene and write report, features and maps")
    common(p)
    p.add_argument("--model", help="trained model JSON; without it regions are not labeled")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("train", help="Monte Carlo training set and classifier fit")
    common(p, seed_default=0)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="model JSON path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a model on fresh seeded scenes")
    common(p, seed_default=1)
    p.add_argument("--model", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="optional summary JSON path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export-map", help="write raw and denoised maps only")
    common(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_export_map)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CrabDetectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
