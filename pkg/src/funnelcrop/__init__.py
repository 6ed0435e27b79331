"""Entropy-scaled, hierarchically-centered multi-scale crop portfolios from
spatial attention grids, plus the unstructured top-K baseline."""

from .attention import (AttentionGrid, average_heads, compose_connector,
                        entropy_norm, normalize, reshape_direct)
from .dumpfile import AttentionDump, dump_to_grid, load_dump, save_dump
from .errors import InvalidInputError
from .geometry import (CropRect, GridGeometry, block_center, blocks_in_rect,
                       clamp_square, full_image_rect)
from .portfolio import (Portfolio, ScaleConfig, build_portfolio,
                        expansion_factor, refine_center, top_k_crops)

__version__ = "0.1.0"

__all__ = [
    "AttentionDump", "AttentionGrid", "CropRect", "GridGeometry",
    "InvalidInputError", "Portfolio", "ScaleConfig", "average_heads",
    "block_center", "blocks_in_rect", "build_portfolio", "clamp_square",
    "compose_connector", "dump_to_grid", "entropy_norm", "expansion_factor",
    "full_image_rect", "load_dump", "normalize", "refine_center",
    "reshape_direct", "save_dump", "top_k_crops",
]
