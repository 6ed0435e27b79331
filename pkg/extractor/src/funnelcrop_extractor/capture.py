"""Model-independent attention-capture logic.

Everything here operates on plain arrays and token id sequences so it can be
tested without loading any model weights. The model-facing glue lives in
``hf_backend``.
"""

import math

import numpy as np

from .errors import ImageSpanError

PROMPT_TEMPLATE = "To answer '{question}', where in the image should I look?"

DUMP_VERSION = 1


def localization_prompt(question):
    if not question or not question.strip():
        raise ValueError("question must be non-empty")
    return PROMPT_TEMPLATE.format(question=question)


def image_token_span(input_ids, image_token_id):
    """Positions of the image tokens in the input sequence.

    The span must exist and be contiguous; anything else is a hard error
    rather than a guess.
    """
    positions = [n for n, t in enumerate(input_ids) if t == image_token_id]
    if not positions:
        raise ImageSpanError(f"no image tokens (id {image_token_id}) in input sequence")
    if positions[-1] - positions[0] + 1 != len(positions):
        raise ImageSpanError("image-token span is not contiguous")
    return positions


def grid_dims_for_token_count(count, rows=None, cols=None):
    """Grid dims for a token count, from processor hints or a square root.

    Errors when the count is not factorizable into the reported grid.
    """
    if rows is not None and cols is not None:
        if rows * cols != count:
            raise ImageSpanError(
                f"{count} image tokens do not fill the reported {rows}x{cols} grid")
        return rows, cols
    side = math.isqrt(count)
    if side * side != count:
        raise ImageSpanError(
            f"{count} image tokens form no square grid and none was reported")
    return side, side


def average_heads_first_token(attn):
    """Head-mean of first-generated-token attention: (H, S) -> (S,)."""
    attn = np.asarray(attn, dtype=np.float64)
    if attn.ndim != 2 or attn.shape[0] < 1:
        raise ValueError(f"expected (heads, seq) attention, got shape {attn.shape}")
    return attn.mean(axis=0)


def build_grid_dump(head_attn, input_ids, image_token_id, grid_rows, grid_cols,
                    image_width, image_height, provenance):
    """Attention-dump document for a direct-projection model.

    ``head_attn`` is the last LLM layer's (heads, seq) attention of the first
    generated token; image-token weights are sliced out and written row-major.
    """
    head_attn = np.asarray(head_attn, dtype=np.float64)
    positions = image_token_span(input_ids, image_token_id)
    rows, cols = grid_dims_for_token_count(len(positions), grid_rows, grid_cols)
    token_attn = average_heads_first_token(head_attn)[positions]
    if not np.all(np.isfinite(token_attn)) or np.any(token_attn < 0):
        raise ValueError("captured attention has negative or non-finite entries")
    return {
        "version": DUMP_VERSION,
        "image": {"width": int(image_width), "height": int(image_height)},
        "grid": {"rows": int(rows), "cols": int(cols),
                 "weights": [float(x) for x in token_attn]},
        "provenance": dict(provenance),
    }


def build_connector_dump(head_attn, input_ids, image_token_id, token_to_patch,
                         grid_rows, grid_cols, image_width, image_height,
                         provenance):
    """Attention-dump document for a connector (query-token) model.

    The token-to-patch cross-attention is written as factors; spatial
    composition happens on the consumer side.
    """
    positions = image_token_span(input_ids, image_token_id)
    token_attn = average_heads_first_token(head_attn)[positions]
    mat = np.asarray(token_to_patch, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] != len(positions):
        raise ValueError(
            f"token-to-patch matrix shape {mat.shape} does not match "
            f"{len(positions)} image tokens")
    if mat.shape[1] != grid_rows * grid_cols:
        raise ValueError(
            f"token-to-patch matrix has {mat.shape[1]} patches, expected "
            f"{grid_rows * grid_cols}")
    if (np.any(mat < 0) or not np.all(np.isfinite(mat))
            or np.any(token_attn < 0) or not np.all(np.isfinite(token_attn))):
        raise ValueError("captured attention has negative or non-finite entries")
    return {
        "version": DUMP_VERSION,
        "image": {"width": int(image_width), "height": int(image_height)},
        "connector": {"rows": int(grid_rows), "cols": int(grid_cols),
                      "tokens": [float(x) for x in token_attn],
                      "token_to_patch": [[float(x) for x in row] for row in mat]},
        "provenance": dict(provenance),
    }
