"""Deterministic manifest construction and rendering.

Manifests keep a fixed key order and render every float at a fixed decimal
precision so that identical inputs always produce byte-identical files.
"""

import json

from .errors import InvalidInputError

MANIFEST_VERSION = 1
DEFAULT_PRECISION = 9


def render_json(value, precision=DEFAULT_PRECISION):
    """Serialize to JSON text with fixed-point floats and stable key order."""
    out = []
    _render(value, precision, out, 0)
    out.append("\n")
    return "".join(out)


def _render(value, precision, out, indent):
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for n, (key, item) in enumerate(value.items()):
            out.append(f'{pad}  {json.dumps(str(key))}: ')
            _render(item, precision, out, indent + 1)
            out.append(",\n" if n < len(value) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            out.append("[]")
            return
        out.append("[\n")
        for n, item in enumerate(value):
            out.append(pad + "  ")
            _render(item, precision, out, indent + 1)
            out.append(",\n" if n < len(value) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(value, bool) or value is None:
        out.append(json.dumps(value))
    elif isinstance(value, float):
        out.append(f"{value:.{precision}f}")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    else:
        raise InvalidInputError(f"cannot serialize {type(value).__name__}")


def _rect_dict(rect):
    return {"left": rect.left, "top": rect.top,
            "right": rect.right, "bottom": rect.bottom}


def _point_dict(xy):
    return {"x": float(xy[0]), "y": float(xy[1])}


def portfolio_manifest(portfolio, mode="funnel", image_name=None):
    """Manifest document for a hierarchical portfolio."""
    cfg = portfolio.config
    geom = portfolio.geometry
    crops = []
    for crop in portfolio.crops:
        square = crop.rect.width == crop.rect.height
        crops.append({
            "level": crop.level,
            "label": crop.label,
            "alpha": float(crop.alpha),
            "center": _point_dict(crop.center),
            "side_requested": float(crop.side_requested),
            "rect": _rect_dict(crop.rect),
            "center_degenerate": crop.center_degenerate,
            "aspect_distorted": not square,
            "file": f"crop_{crop.level}.png",
        })
    return {
        "version": MANIFEST_VERSION,
        "mode": mode,
        "image": {"name": image_name, "width": geom.image_width,
                  "height": geom.image_height},
        "grid": {"rows": geom.rows, "cols": geom.cols},
        "config": {
            "resolution": cfg.resolution,
            "levels": cfg.levels,
            "level_params": [[float(b), float(g)] for b, g in cfg.level_params],
        },
        "h_norm": float(portfolio.h_norm),
        "grid_degenerate": portfolio.grid_degenerate,
        "order": ["original"] + [c.label for c in portfolio.crops],
        "crops": crops,
    }


def topk_manifest(windows, geom, resolution, window_side, h_norm,
                  grid_degenerate, requested_k, image_name=None):
    """Manifest document for the unstructured top-K baseline."""
    crops = []
    for n, win in enumerate(windows):
        square = win.rect.width == win.rect.height
        crops.append({
            "index": n,
            "anchor_block": {"row": win.anchor[0], "col": win.anchor[1]},
            "score": float(win.score),
            "rect": _rect_dict(win.rect),
            "aspect_distorted": not square,
            "file": f"crop_{n}.png",
        })
    return {
        "version": MANIFEST_VERSION,
        "mode": f"topk:{requested_k}",
        "image": {"name": image_name, "width": geom.image_width,
                  "height": geom.image_height},
        "grid": {"rows": geom.rows, "cols": geom.cols},
        "config": {"resolution": resolution, "window_side": float(window_side),
                   "anchoring": "block-centers"},
        "h_norm": float(h_norm),
        "grid_degenerate": grid_degenerate,
        "order": ["original"] + [f"top{n + 1}" for n in range(len(windows))],
        "crops": crops,
    }
