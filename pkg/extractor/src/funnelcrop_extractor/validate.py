"""Standalone validation of attention-dump files against the consumer's
JSON schema: version, image dims, exactly one of grid / connector factors,
matching shapes, non-negative finite weights."""

import json
import math
from dataclasses import dataclass, field


@dataclass
class ValidationReport:
    path: str
    problems: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.problems

    def summary(self):
        if self.ok:
            return f"{self.path}: OK"
        lines = [f"{self.path}: {len(self.problems)} problem(s)"]
        lines += [f"  - {p}" for p in self.problems]
        return "\n".join(lines)


def _nonneg_finite(values):
    return all(isinstance(v, (int, float)) and not isinstance(v, bool)
               and math.isfinite(v) and v >= 0 for v in values)


def _check_grid(grid, problems):
    rows, cols = grid.get("rows"), grid.get("cols")
    dims_ok = (isinstance(rows, int) and rows >= 1
               and isinstance(cols, int) and cols >= 1)
    if not dims_ok:
        problems.append("grid.rows/cols: must be integers >= 1")
    weights = grid.get("weights")
    if not isinstance(weights, list):
        problems.append("grid.weights: missing or not a list")
        return
    if dims_ok and len(weights) != rows * cols:
        problems.append(f"grid.weights: length {len(weights)} != {rows * cols}")
    if not _nonneg_finite(weights):
        problems.append("grid.weights: entries must be non-negative finite numbers")


def _check_connector(conn, problems):
    rows, cols = conn.get("rows"), conn.get("cols")
    dims_ok = (isinstance(rows, int) and rows >= 1
               and isinstance(cols, int) and cols >= 1)
    if not dims_ok:
        problems.append("connector.rows/cols: must be integers >= 1")
    tokens = conn.get("tokens")
    if not isinstance(tokens, list) or not tokens:
        problems.append("connector.tokens: missing or empty")
        tokens = None
    elif not _nonneg_finite(tokens):
        problems.append("connector.tokens: entries must be non-negative finite numbers")
    mat = conn.get("token_to_patch")
    if not isinstance(mat, list) or not mat:
        problems.append("connector.token_to_patch: missing or empty")
        return
    if tokens is not None and len(mat) != len(tokens):
        problems.append("connector.token_to_patch: row count != token count")
    for n, row in enumerate(mat):
        if not isinstance(row, list) or (dims_ok and len(row) != rows * cols):
            problems.append(f"connector.token_to_patch: row {n} has wrong length")
            return
        if not _nonneg_finite(row):
            problems.append(f"connector.token_to_patch: row {n} has invalid entries")
            return


def validate_dump_doc(doc, path="<memory>"):
    report = ValidationReport(path=str(path))
    problems = report.problems
    if not isinstance(doc, dict):
        problems.append("document is not a JSON object")
        return report
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
        return report
    if grid is not None:
        if isinstance(grid, dict):
            _check_grid(grid, problems)
        else:
            problems.append("grid: not an object")
    elif isinstance(conn, dict):
        _check_connector(conn, problems)
    else:
        problems.append("connector: not an object")
    return report


def validate_dump(path):
    """Validate a dump file; unreadable files yield a failing report."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        report = ValidationReport(path=str(path))
        report.problems.append(f"unreadable: {exc}")
        return report
    return validate_dump_doc(doc, path)
