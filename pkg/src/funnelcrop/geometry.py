"""Mapping between the patch grid and pixel space, plus square-crop
rectangle arithmetic with boundary clamping.

Pixel origin is the top-left corner, x rightward, y downward. All pixel
intervals are half-open: a rect covers [left, right) x [top, bottom).
"""

import math
from dataclasses import dataclass

from .errors import InvalidInputError


@dataclass(frozen=True)
class GridGeometry:
    """Pixel dimensions of the image plus the patch-grid layout over it."""

    image_width: int
    image_height: int
    rows: int
    cols: int

    def __post_init__(self):
        if self.image_width < 1 or self.image_height < 1:
            raise InvalidInputError("image dims must be >= 1")
        if self.rows < 1 or self.cols < 1:
            raise InvalidInputError("grid dims must be >= 1")

    @property
    def block_width(self):
        return self.image_width / self.cols

    @property
    def block_height(self):
        return self.image_height / self.rows


@dataclass(frozen=True)
class CropRect:
    """A clamped crop window: the real-valued requested center/side plus the
    finalized integer pixel bounds."""

    center: tuple
    side: float
    left: int
    top: int
    right: int
    bottom: int

    @property
    def width(self):
        return self.right - self.left

    @property
    def height(self):
        return self.bottom - self.top

    @property
    def pixel_center(self):
        return ((self.left + self.right) / 2.0, (self.top + self.bottom) / 2.0)

    def overlaps(self, other):
        """True when the two rects share positive-area intersection."""
        return not (self.right <= other.left or other.right <= self.left
                    or self.bottom <= other.top or other.bottom <= self.top)


def block_center(geom, i, j):
    """Pixel-space center of grid block (i, j)."""
    if not (0 <= i < geom.rows and 0 <= j < geom.cols):
        raise InvalidInputError(f"block index ({i},{j}) outside {geom.rows}x{geom.cols} grid")
    return ((j + 0.5) * geom.block_width, (i + 0.5) * geom.block_height)


def _clamp_axis(c, side, extent):
    # Per-axis: cap the side at the image extent, shift the center the
    # minimal distance so the window fits, then round bounds outward and
    # re-clip to the image edge. Floor/ceil arguments are snapped to
    # micro-pixels so last-ulp noise (e.g. from rescaled attention weights)
    # cannot flip a pixel boundary.
    eff = min(side, extent)
    half = eff / 2.0
    c = min(max(c, half), extent - half)
    size = math.ceil(round(eff, 6))
    lo = math.floor(round(c - half, 6))
    hi = lo + size
    if hi > extent:
        hi = extent
        lo = extent - size
    if lo < 0:
        lo = 0
        hi = size
    return c, lo, hi


def clamp_square(center, side, geom):
    """Clamp a side x side window centered at ``center`` into the image.

    The window is shifted rather than truncated; the side shrinks only on an
    axis where it exceeds the image extent (so the result can be non-square
    only when an image dimension is smaller than the side).
    """
    if side <= 0:
        raise InvalidInputError("crop side must be positive")
    cx, left, right = _clamp_axis(center[0], side, geom.image_width)
    cy, top, bottom = _clamp_axis(center[1], side, geom.image_height)
    return CropRect(center=(cx, cy), side=float(side),
                    left=left, top=top, right=right, bottom=bottom)


def blocks_in_rect(rect, geom):
    """Grid blocks whose centers fall inside the rect, in row-major order.

    Falls back to the single block whose center is nearest the rect center
    (ties: smallest row, then column) when no center is covered, so weighted
    sums over the result are never empty.
    """
    hits = []
    for i in range(geom.rows):
        cy = (i + 0.5) * geom.block_height
        if not (rect.top <= cy < rect.bottom):
            continue
        for j in range(geom.cols):
            cx = (j + 0.5) * geom.block_width
            if rect.left <= cx < rect.right:
                hits.append((i, j))
    if hits:
        return hits
    rcx, rcy = rect.pixel_center
    best = None
    best_d = None
    for i in range(geom.rows):
        for j in range(geom.cols):
            cx, cy = block_center(geom, i, j)
            d = (cx - rcx) ** 2 + (cy - rcy) ** 2
            if best_d is None or d < best_d:
                best, best_d = (i, j), d
    return [best]


def full_image_rect(geom):
    """The rect covering the entire image."""
    return CropRect(center=(geom.image_width / 2.0, geom.image_height / 2.0),
                    side=float(max(geom.image_width, geom.image_height)),
                    left=0, top=0, right=geom.image_width, bottom=geom.image_height)
