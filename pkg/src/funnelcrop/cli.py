"""Command-line surface: portfolio generation, batch runs, and config sweeps."""

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import imaging
from .attention import entropy_norm, normalize
from .config import (SWEEP_PRESETS, apply_param_overrides, build_run_config,
                     load_config_file, parse_sweep_spec)
from .dumpfile import dump_to_grid, load_dump
from .errors import InvalidInputError
from .manifest import portfolio_manifest, render_json, topk_manifest
from .portfolio import ScaleConfig, build_portfolio, top_k_crops

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARTIAL = 2


def _fail(category, message):
    sys.stderr.write(json.dumps({"error": category, "message": str(message)}) + "\n")
    return EXIT_FAILURE


def _parse_level_value(text):
    try:
        k, v = text.split("=", 1)
        return int(k), float(v)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected K=V, got {text!r}") from exc


def _add_config_flags(parser):
    parser.add_argument("--resolution", type=int, help="target crop resolution S")
    parser.add_argument("--levels", type=int, help="portfolio level count K")
    parser.add_argument("--beta", type=_parse_level_value, action="append",
                        metavar="K=V", help="base expansion for level K")
    parser.add_argument("--gamma", type=_parse_level_value, action="append",
                        metavar="K=V", help="entropy sensitivity for level K")
    parser.add_argument("--mode", help="funnel | topk:N | static")
    parser.add_argument("--overlay", action="store_true", default=None,
                        help="also render an outline overlay image")
    parser.add_argument("--config", help="JSON config file (flags override it)")


def _resolve_config(args, out_dir=None):
    file_values = load_config_file(args.config) if args.config else None
    cfg = build_run_config(
        file_values,
        resolution=args.resolution,
        levels=args.levels,
        mode=args.mode,
        overlay=args.overlay,
        out_dir=out_dir,
    )
    if args.beta or args.gamma:
        params = apply_param_overrides(cfg.level_params, dict(args.beta or []),
                                       dict(args.gamma or []), cfg.levels)
        cfg = build_run_config(
            {**(file_values or {}), "level_params": params},
            resolution=args.resolution, levels=args.levels, mode=args.mode,
            overlay=args.overlay, out_dir=out_dir)
    return cfg


def _load_pair(image_path, dump_path):
    dump = load_dump(dump_path)
    img = imaging.load_image(image_path)
    h, w = img.shape[:2]
    if (w, h) != (dump.image_width, dump.image_height):
        raise InvalidInputError(
            f"image is {w}x{h} but dump declares "
            f"{dump.image_width}x{dump.image_height}")
    raw_grid, geom = dump_to_grid(dump)
    return img, normalize(raw_grid), geom


def _portfolio_outputs(img, grid, geom, run_cfg, image_name):
    """All output files for one pair, as (relative name, bytes) tuples."""
    files = []
    s = run_cfg.resolution
    if run_cfg.topk is not None:
        h_norm = entropy_norm(grid)
        windows = top_k_crops(grid, geom, run_cfg.topk,
                              run_cfg.effective_window_side())
        doc = topk_manifest(windows, geom, s, run_cfg.effective_window_side(),
                            h_norm, grid.degenerate, run_cfg.topk,
                            image_name=image_name)
        rects = [w.rect for w in windows]
        overlay = (imaging.render_overlay(img, None, baseline=windows)
                   if run_cfg.overlay else None)
    else:
        portfolio = build_portfolio(grid, geom, run_cfg.scale_config())
        doc = portfolio_manifest(portfolio, mode=run_cfg.mode,
                                 image_name=image_name)
        rects = [c.rect for c in portfolio.crops]
        overlay = (imaging.render_overlay(img, portfolio)
                   if run_cfg.overlay else None)
    for n, rect in enumerate(rects):
        crop = imaging.resize_to_s(imaging.extract_crop(img, rect), s)
        files.append((f"crop_{n}.png", imaging.encode_png(crop)))
    if overlay is not None:
        files.append(("overlay.png", imaging.encode_png(overlay)))
    files.append(("manifest.json",
                  render_json(doc, run_cfg.precision).encode("utf-8")))
    return files, doc


def _write_outputs(out_dir, files):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, data in files:
        (out_dir / name).write_bytes(data)


def cmd_generate(args):
    try:
        run_cfg = _resolve_config(args, out_dir=args.out)
        img, grid, geom = _load_pair(args.image, args.attn)
        files, _ = _portfolio_outputs(img, grid, geom, run_cfg,
                                      Path(args.image).name)
    except InvalidInputError as exc:
        return _fail("invalid-input", exc)
    except OSError as exc:
        return _fail("io", exc)
    _write_outputs(run_cfg.out_dir, files)
    return EXIT_OK


def _load_listing(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read listing {path}: {exc}") from exc
    if not isinstance(doc, list):
        raise InvalidInputError("listing must be a JSON array")
    pairs = []
    for n, entry in enumerate(doc):
        if not (isinstance(entry, dict) and "image" in entry and "dump" in entry):
            raise InvalidInputError(f"listing entry {n} needs image and dump keys")
        pairs.append((str(entry["image"]), str(entry["dump"])))
    return pairs


def _hnorm_stats(values):
    if not values:
        return {"count": 0}
    values = sorted(values)
    n = len(values)
    mid = n // 2
    median = values[mid] if n % 2 else (values[mid - 1] + values[mid]) / 2.0
    return {"count": n, "min": values[0], "max": values[-1],
            "mean": sum(values) / n, "median": median}


def cmd_batch(args):
    try:
        pairs = _load_listing(args.list)
        run_cfg = _resolve_config(args, out_dir=args.out)
    except InvalidInputError as exc:
        return _fail("invalid-input", exc)
    out_root = Path(run_cfg.out_dir)
    results = []
    h_values = []
    degenerate = 0
    for n, (image_path, dump_path) in enumerate(pairs):
        pair_dir = out_root / f"{n:04d}_{Path(image_path).stem}"
        record = {"index": n, "image": image_path, "dump": dump_path,
                  "output": pair_dir.name}
        try:
            img, grid, geom = _load_pair(image_path, dump_path)
            files, doc = _portfolio_outputs(img, grid, geom, run_cfg,
                                            Path(image_path).name)
            _write_outputs(pair_dir, files)
            record["status"] = "ok"
            record["h_norm"] = doc["h_norm"]
            h_values.append(doc["h_norm"])
            if doc["grid_degenerate"]:
                degenerate += 1
                record["grid_degenerate"] = True
        except (InvalidInputError, OSError) as exc:
            record["status"] = "failed"
            record["error"] = str(exc)
        results.append(record)
    ok = sum(1 for r in results if r["status"] == "ok")
    failed = len(results) - ok
    summary = {
        "version": 1,
        "total": len(results),
        "succeeded": ok,
        "failed": failed,
        "degenerate_grids": degenerate,
        "h_norm": _hnorm_stats(h_values),
        "pairs": results,
    }
    out_root.mkdir(parents=True, exist_ok=True)
    (out_root / "summary.json").write_text(render_json(summary, run_cfg.precision),
                                           encoding="utf-8")
    from .report import save_hnorm_histogram

    save_hnorm_histogram(h_values, out_root / "hnorm_hist.png")
    if failed == 0:
        return EXIT_OK
    if ok == 0:
        return EXIT_FAILURE
    return EXIT_PARTIAL


DEFAULT_SWEEP = ("static", "weak", "default", "strong", "beta-0.2", "beta+0.2",
                 "k0", "k1", "k2", "k3", "k4")


def _sweep_rows(grid, geom, specs, resolution):
    rows = []
    for spec in specs:
        cfg = ScaleConfig(resolution, spec["levels"], spec["level_params"])
        portfolio = build_portfolio(grid, geom, cfg)
        rows.append({
            "label": spec["label"],
            "extrapolated": spec["extrapolated"],
            "levels": cfg.levels,
            "h_norm": portfolio.h_norm,
            "sides": [int(c.side_requested) for c in portfolio.crops],
            "centers": [c.center for c in portfolio.crops],
        })
    return rows


def _sweep_csv(rows, precision):
    max_levels = max((r["levels"] for r in rows), default=0)
    header = ["config", "levels", "extrapolated", "h_norm"]
    for k in range(max_levels):
        header += [f"side_{k}", f"center_x_{k}", f"center_y_{k}"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        rec = [row["label"], row["levels"], int(row["extrapolated"]),
               f"{row['h_norm']:.{precision}f}"]
        for k in range(max_levels):
            if k < row["levels"]:
                x, y = row["centers"][k]
                rec += [row["sides"][k], f"{x:.{precision}f}", f"{y:.{precision}f}"]
            else:
                rec += ["", "", ""]
        writer.writerow(rec)
    return buf.getvalue()


def cmd_sweep(args):
    try:
        specs = [parse_sweep_spec(s.strip())
                 for s in (args.configs.split(",") if args.configs else DEFAULT_SWEEP)
                 if s.strip()]
        resolution = args.resolution or 336
        img, grid, geom = _load_pair(args.image, args.attn)
        rows = _sweep_rows(grid, geom, specs, resolution)
    except InvalidInputError as exc:
        return _fail("invalid-input", exc)
    except OSError as exc:
        return _fail("io", exc)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "sweep.csv").write_text(_sweep_csv(rows, args.precision),
                                       encoding="utf-8")
    from .report import save_sweep_chart

    save_sweep_chart(rows, out_dir / "sweep.png")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="funnelcrop",
        description="Entropy-scaled multi-scale crop portfolios from spatial "
                    "attention grids.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="build one crop portfolio")
    gen.add_argument("--image", required=True)
    gen.add_argument("--attn", required=True, help="attention dump JSON")
    gen.add_argument("--out", required=True, help="output directory")
    _add_config_flags(gen)
    gen.set_defaults(func=cmd_generate)

    batch = sub.add_parser("batch", help="process a listing of (image, dump) pairs")
    batch.add_argument("--list", required=True,
                       help="JSON array of {image, dump} entries")
    batch.add_argument("--out", required=True)
    _add_config_flags(batch)
    batch.set_defaults(func=cmd_batch)

    sweep = sub.add_parser("sweep", help="compare portfolio geometry across configs")
    sweep.add_argument("--image", required=True)
    sweep.add_argument("--attn", required=True)
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--resolution", type=int)
    sweep.add_argument("--configs",
                       help="comma list of preset labels or K@b:g,... tuples "
                            f"(presets: {', '.join(SWEEP_PRESETS)})")
    sweep.add_argument("--precision", type=int, default=9)
    sweep.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
