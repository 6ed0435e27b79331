"""Attention-dump JSON file format: the contract between attention
extraction adapters and the portfolio core.

A dump carries either a ready spatial grid or connector factors (token
vector plus token-to-patch matrix) for core-side composition, never both.
"""

import json
import math
from dataclasses import dataclass, field

from .attention import compose_connector, reshape_direct
from .errors import InvalidInputError
from .geometry import GridGeometry

DUMP_VERSION = 1


@dataclass(frozen=True)
class AttentionDump:
    version: int
    image_width: int
    image_height: int
    grid: dict = None          # {"rows", "cols", "weights": row-major flat list}
    connector: dict = None     # {"rows", "cols", "tokens", "token_to_patch"}
    provenance: dict = field(default_factory=dict)
    degenerate_flags: tuple = ()


def _check(cond, problems, msg):
    if not cond:
        problems.append(msg)
    return cond


def _is_nonneg_finite(values):
    return all(isinstance(v, (int, float)) and not isinstance(v, bool)
               and math.isfinite(v) and v >= 0 for v in values)


def validate_dump_dict(doc):
    """Schema and shape problems in a parsed dump document; empty if valid."""
    problems = []
    if not isinstance(doc, dict):
        return ["dump document is not a JSON object"]
    if not isinstance(doc.get("version"), int):
        problems.append("version: missing or not an integer")
    image = doc.get("image")
    if not (isinstance(image, dict)
            and isinstance(image.get("width"), int) and image["width"] >= 1
            and isinstance(image.get("height"), int) and image["height"] >= 1):
        problems.append("image: missing width/height >= 1")
    grid = doc.get("grid")
    conn = doc.get("connector")
    if (grid is None) == (conn is None):
        problems.append("exactly one of grid / connector must be present")
        return problems
    if grid is not None:
        if not isinstance(grid, dict):
            return problems + ["grid: not an object"]
        rows, cols = grid.get("rows"), grid.get("cols")
        ok = _check(isinstance(rows, int) and rows >= 1
                    and isinstance(cols, int) and cols >= 1,
                    problems, "grid: rows/cols must be integers >= 1")
        weights = grid.get("weights")
        if not isinstance(weights, list):
            problems.append("grid.weights: missing or not a list")
        else:
            if ok and len(weights) != rows * cols:
                problems.append(
                    f"grid.weights: length {len(weights)} != rows*cols {rows * cols}")
            if not _is_nonneg_finite(weights):
                problems.append("grid.weights: entries must be non-negative finite numbers")
    else:
        if not isinstance(conn, dict):
            return problems + ["connector: not an object"]
        rows, cols = conn.get("rows"), conn.get("cols")
        ok = _check(isinstance(rows, int) and rows >= 1
                    and isinstance(cols, int) and cols >= 1,
                    problems, "connector: rows/cols must be integers >= 1")
        tokens = conn.get("tokens")
        mat = conn.get("token_to_patch")
        if not isinstance(tokens, list) or not tokens:
            problems.append("connector.tokens: missing or empty")
            tokens = None
        elif not _is_nonneg_finite(tokens):
            problems.append("connector.tokens: entries must be non-negative finite numbers")
        if not isinstance(mat, list) or not mat:
            problems.append("connector.token_to_patch: missing or empty")
        else:
            if tokens is not None and len(mat) != len(tokens):
                problems.append("connector.token_to_patch: row count != token count")
            for r, row in enumerate(mat):
                if not isinstance(row, list) or (ok and len(row) != rows * cols):
                    problems.append(f"connector.token_to_patch: row {r} has wrong length")
                    break
                if not _is_nonneg_finite(row):
                    problems.append(f"connector.token_to_patch: row {r} has invalid entries")
                    break
    return problems


def dump_from_dict(doc):
    problems = validate_dump_dict(doc)
    if problems:
        raise InvalidInputError("invalid attention dump: " + "; ".join(problems))
    return AttentionDump(
        version=doc["version"],
        image_width=doc["image"]["width"],
        image_height=doc["image"]["height"],
        grid=doc.get("grid"),
        connector=doc.get("connector"),
        provenance=doc.get("provenance", {}),
        degenerate_flags=tuple(doc.get("degenerate_flags", [])),
    )


def dump_to_dict(dump):
    doc = {
        "version": dump.version,
        "image": {"width": dump.image_width, "height": dump.image_height},
    }
    if dump.grid is not None:
        doc["grid"] = dump.grid
    if dump.connector is not None:
        doc["connector"] = dump.connector
    if dump.provenance:
        doc["provenance"] = dump.provenance
    if dump.degenerate_flags:
        doc["degenerate_flags"] = list(dump.degenerate_flags)
    return doc


def load_dump(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read attention dump {path}: {exc}") from exc
    return dump_from_dict(doc)


def save_dump(dump, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dump_to_dict(dump), fh, indent=2)
        fh.write("\n")


def dump_to_grid(dump):
    """The (unnormalized grid, geometry) pair a dump describes."""
    if dump.grid is not None:
        spec = dump.grid
        grid = reshape_direct(spec["weights"], spec["rows"], spec["cols"])
    else:
        spec = dump.connector
        grid = compose_connector(spec["tokens"], spec["token_to_patch"],
                                 spec["rows"], spec["cols"])
    geom = GridGeometry(image_width=dump.image_width, image_height=dump.image_height,
                        rows=spec["rows"], cols=spec["cols"])
    return grid, geom
