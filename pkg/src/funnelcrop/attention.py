"""Spatial attention grid math: head averaging, connector composition,
normalization, and normalized Shannon entropy."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

GRID_SUM_TOL = 1e-9


def _as_float_array(values, name, ndim):
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise InvalidInputError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInputError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    if np.any(arr < 0):
        raise InvalidInputError(f"{name} contains negative entries")
    return arr


@dataclass(frozen=True)
class AttentionGrid:
    """Dense non-negative weight grid over vision-encoder patch blocks.

    ``degenerate`` marks grids produced from an all-zero input (replaced by
    the uniform fallback during normalization).
    """

    weights: np.ndarray
    normalized: bool = False
    degenerate: bool = False

    def __post_init__(self):
        arr = _as_float_array(self.weights, "grid weights", 2)
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "weights", arr)
        if self.normalized and abs(float(arr.sum()) - 1.0) > GRID_SUM_TOL:
            raise InvalidInputError("grid flagged normalized but weights do not sum to 1")

    @property
    def rows(self):
        return self.weights.shape[0]

    @property
    def cols(self):
        return self.weights.shape[1]


def average_heads(raw):
    """Average per-head token attention rows into a single token vector.

    ``raw`` is an H x T array of non-negative weights, one row per head.
    """
    arr = _as_float_array(raw, "head attention", 2)
    return arr.mean(axis=0)


def compose_connector(tok, token_to_patch, rows, cols):
    """Combine token attention with a token-to-patch matrix into a grid.

    Grid value at flat patch index p is sum_t tok[t] * token_to_patch[t][p],
    reshaped row-major into (rows, cols). Result is unnormalized.
    """
    tok = _as_float_array(tok, "token attention", 1)
    mat = _as_float_array(token_to_patch, "token-to-patch matrix", 2)
    if rows < 1 or cols < 1:
        raise InvalidInputError("grid dims must be >= 1")
    if mat.shape[0] != tok.shape[0]:
        raise InvalidInputError(
            f"token count {tok.shape[0]} does not match matrix rows {mat.shape[0]}")
    if mat.shape[1] != rows * cols:
        raise InvalidInputError(
            f"matrix has {mat.shape[1]} patch columns, expected {rows * cols}")
    flat = tok @ mat
    return AttentionGrid(flat.reshape(rows, cols))


def reshape_direct(tok, rows, cols):
    """Row-major reshape of a token vector into an unnormalized grid."""
    tok = _as_float_array(tok, "token attention", 1)
    if rows < 1 or cols < 1:
        raise InvalidInputError("grid dims must be >= 1")
    if tok.shape[0] != rows * cols:
        raise InvalidInputError(
            f"token count {tok.shape[0]} does not match grid {rows}x{cols}")
    return AttentionGrid(tok.reshape(rows, cols))


def normalize(grid):
    """Scale grid weights to a probability distribution.

    An all-zero grid falls back to the uniform distribution with the
    ``degenerate`` flag set, so downstream processing always has a valid
    distribution to work with.
    """
    total = float(grid.weights.sum())
    if total == 0.0:
        uniform = np.full(grid.weights.shape, 1.0 / grid.weights.size)
        return AttentionGrid(uniform, normalized=True, degenerate=True)
    return AttentionGrid(grid.weights / total, normalized=True, degenerate=grid.degenerate)


def entropy_norm(grid):
    """Shannon entropy of a normalized grid, scaled by log(cell count) to [0,1].

    Convention 0*log(0) = 0; the result is clamped against floating-point
    drift just outside [0, 1].
    """
    if not grid.normalized:
        raise InvalidInputError("entropy requires a normalized grid")
    n = grid.weights.size
    if n < 2:
        raise InvalidInputError("entropy undefined for a 1x1 grid")
    p = grid.weights[grid.weights > 0]
    h = -float(np.sum(p * np.log(p))) / math.log(n)
    return min(max(h, 0.0), 1.0)
