"""Entropy-scaled crop expansion, hierarchical center refinement, portfolio
assembly, and the unstructured top-K baseline."""

import math
from dataclasses import dataclass

from .attention import entropy_norm
from .errors import InvalidInputError
from .geometry import block_center, blocks_in_rect, clamp_square, full_image_rect

# Default per-level (base, entropy-sensitivity) expansion parameters for
# levels 1..3. Level 3 ("global context") has no published values; its
# (2.0, 1.6) pair is an extrapolation of the default progression and is
# labeled as such by the sweep runner.
DEFAULT_LEVEL_PARAMS = ((1.2, 0.6), (1.6, 1.2), (2.0, 1.6))
DEFAULT_RESOLUTION = 336
DEFAULT_LEVELS = 3

LEVEL_LABELS = ("focal", "immediate", "broader", "global")


def level_label(k):
    return LEVEL_LABELS[k] if k < len(LEVEL_LABELS) else f"level{k}"


def default_level_params(levels):
    """Default (base, sensitivity) pairs for levels 1..levels-1."""
    if levels - 1 > len(DEFAULT_LEVEL_PARAMS):
        raise InvalidInputError(
            f"no default expansion params beyond {len(DEFAULT_LEVEL_PARAMS) + 1} levels")
    return DEFAULT_LEVEL_PARAMS[:max(levels - 1, 0)]


@dataclass(frozen=True)
class ScaleConfig:
    """Crop-portfolio sizing: target resolution, level count, and per-level
    expansion parameters (for levels 1..levels-1; level 0 never expands)."""

    resolution: int = DEFAULT_RESOLUTION
    levels: int = DEFAULT_LEVELS
    level_params: tuple = DEFAULT_LEVEL_PARAMS[:DEFAULT_LEVELS - 1]

    def __post_init__(self):
        if self.resolution < 1:
            raise InvalidInputError("resolution must be >= 1")
        if self.levels < 0:
            raise InvalidInputError("level count must be >= 0")
        params = tuple((float(b), float(g)) for b, g in self.level_params)
        object.__setattr__(self, "level_params", params)
        if len(params) != max(self.levels - 1, 0):
            raise InvalidInputError(
                f"{self.levels} levels require {max(self.levels - 1, 0)} "
                f"expansion pairs, got {len(params)}")
        for b, g in params:
            if b < 1.0:
                raise InvalidInputError("base expansion factor must be >= 1")
            if g < 0.0:
                raise InvalidInputError("entropy sensitivity must be >= 0")

    def with_zero_sensitivity(self):
        """The static variant: same bases, all sensitivities zeroed."""
        return ScaleConfig(self.resolution, self.levels,
                           tuple((b, 0.0) for b, _ in self.level_params))


@dataclass(frozen=True)
class CropSpec:
    """One portfolio level: its expansion factor, refined center, requested
    side, and finalized rect."""

    level: int
    label: str
    alpha: float
    center: tuple
    side_requested: float
    rect: object
    center_degenerate: bool


@dataclass(frozen=True)
class Portfolio:
    """Ordered crop set for one (image, attention grid) pair."""

    h_norm: float
    grid_degenerate: bool
    crops: tuple
    config: ScaleConfig
    geometry: object


@dataclass(frozen=True)
class ScoredWindow:
    """One top-K baseline window: anchor block, mean-attention score, rect."""

    anchor: tuple
    score: float
    rect: object


def expansion_factor(k, h, cfg):
    """Level-k crop expansion factor: base + sensitivity * entropy."""
    if not (0.0 <= h <= 1.0):
        raise InvalidInputError(f"normalized entropy {h} outside [0, 1]")
    if not (1 <= k < cfg.levels):
        raise InvalidInputError(f"level {k} outside 1..{cfg.levels - 1}")
    base, sens = cfg.level_params[k - 1]
    return base + sens * h


def refine_center(grid, region, geom):
    """Attention-weighted mean of block centers within the region.

    Returns ((x, y), degenerate). When the region carries zero attention
    mass, or covers no block center at all, the geometric center of the
    region is returned with the degenerate flag set; the result therefore
    always lies inside the region.
    """
    if not grid.normalized:
        raise InvalidInputError("center refinement requires a normalized grid")
    if (grid.rows, grid.cols) != (geom.rows, geom.cols):
        raise InvalidInputError("grid dims do not match geometry")
    blocks = [(i, j) for i in range(geom.rows) for j in range(geom.cols)
              if region.left <= (j + 0.5) * geom.block_width < region.right
              and region.top <= (i + 0.5) * geom.block_height < region.bottom]
    total = 0.0
    sx = 0.0
    sy = 0.0
    for i, j in blocks:
        w = float(grid.weights[i, j])
        cx, cy = block_center(geom, i, j)
        total += w
        sx += cx * w
        sy += cy * w
    if total == 0.0:
        return region.pixel_center, True
    return (sx / total, sy / total), False


def _round_half_up(x):
    # Snap to micro-pixels first so last-ulp noise cannot flip the boundary.
    return math.floor(round(x, 6) + 0.5)


def build_portfolio(grid, geom, cfg):
    """Assemble the hierarchical multi-scale crop portfolio.

    Entropy is computed once over the full grid; level 0 is the focal
    resolution-sized crop at the global attention centroid, and each further
    level recenters within the previous level's finalized rect and expands
    by its entropy-scaled factor.
    """
    if not grid.normalized:
        raise InvalidInputError("portfolio requires a normalized grid")
    if grid.weights.size < 2:
        raise InvalidInputError("portfolio requires a grid larger than 1x1")
    h = entropy_norm(grid)
    crops = []
    if cfg.levels > 0:
        region = full_image_rect(geom)
        mu, degen = refine_center(grid, region, geom)
        rect = clamp_square(mu, cfg.resolution, geom)
        crops.append(CropSpec(0, level_label(0), 1.0, mu,
                              float(cfg.resolution), rect, degen))
        for k in range(1, cfg.levels):
            parent = crops[-1].rect
            mu, degen = refine_center(grid, parent, geom)
            alpha = expansion_factor(k, h, cfg)
            side = _round_half_up(alpha * cfg.resolution)
            rect = clamp_square(mu, side, geom)
            crops.append(CropSpec(k, level_label(k), alpha, mu,
                                  float(side), rect, degen))
    return Portfolio(h_norm=h, grid_degenerate=grid.degenerate,
                     crops=tuple(crops), config=cfg, geometry=geom)


def _window_candidates(grid, geom, window_side):
    cands = []
    for i in range(geom.rows):
        for j in range(geom.cols):
            rect = clamp_square(block_center(geom, i, j), window_side, geom)
            blocks = blocks_in_rect(rect, geom)
            score = sum(float(grid.weights[bi, bj]) for bi, bj in blocks) / len(blocks)
            cands.append(ScoredWindow(anchor=(i, j), score=score, rect=rect))
    return cands


def top_k_crops(grid, geom, k, window_side):
    """Greedy non-overlapping selection of the highest mean-attention windows.

    Candidates are clamped windows centered at every block center; ties break
    by smaller anchor row, then column. Returns at most k windows with
    non-increasing scores and pairwise zero-area overlap.
    """
    if not grid.normalized:
        raise InvalidInputError("top-k selection requires a normalized grid")
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    if window_side <= 0:
        raise InvalidInputError("window side must be positive")
    cands = _window_candidates(grid, geom, window_side)
    cands.sort(key=lambda c: (-c.score, c.anchor))
    selected = []
    for cand in cands:
        if len(selected) == k:
            break
        if any(cand.rect.overlaps(s.rect) for s in selected):
            continue
        selected.append(cand)
    return selected
