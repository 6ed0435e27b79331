"""Image IO, crop extraction, bilinear resizing, and rectangle-overlay
rendering. In-memory images are (H, W, 3) uint8 RGB numpy arrays."""

import numpy as np
from PIL import Image

from .errors import InvalidInputError

# Outline colors per portfolio level (focal, immediate, broader, global) and
# for baseline windows.
LEVEL_COLORS = ((0, 80, 255), (0, 200, 80), (160, 60, 220), (255, 160, 0))
BASELINE_COLOR = (230, 30, 30)
STROKE = 2


def load_image(path):
    """Read a PNG or JPEG as an RGB uint8 array (alpha discarded)."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8).copy()


def save_png(img, path):
    Image.fromarray(img, mode="RGB").save(path, format="PNG")


def encode_png(img):
    """PNG bytes for an RGB array (deterministic for identical input)."""
    import io

    buf = io.BytesIO()
    Image.fromarray(img, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def extract_crop(img, rect):
    """Exact pixel copy of the rect's half-open bounds."""
    h, w = img.shape[:2]
    if rect.left < 0 or rect.top < 0 or rect.right > w or rect.bottom > h:
        raise InvalidInputError("crop rect extends outside the image")
    if rect.width <= 0 or rect.height <= 0:
        raise InvalidInputError("crop rect has empty area")
    return img[rect.top:rect.bottom, rect.left:rect.right].copy()


def resize_to_s(img, s):
    """Resize to s x s with bilinear interpolation, half-pixel aligned.

    An input already at s x s is passed through bit-identically. Non-square
    inputs are resized anisotropically.
    """
    if s < 1:
        raise InvalidInputError("target size must be >= 1")
    h, w = img.shape[:2]
    if (h, w) == (s, s):
        return img.copy()
    src = img.astype(np.float64)
    ys = np.clip((np.arange(s) + 0.5) * (h / s) - 0.5, 0.0, h - 1.0)
    xs = np.clip((np.arange(s) + 0.5) * (w / s) - 0.5, 0.0, w - 1.0)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    wy = (ys - y0)[:, None, None]
    wx = (xs - x0)[None, :, None]
    top = src[y0][:, x0] * (1.0 - wx) + src[y0][:, x1] * wx
    bot = src[y1][:, x0] * (1.0 - wx) + src[y1][:, x1] * wx
    out = top * (1.0 - wy) + bot * wy
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def _stroke_rect(img, rect, color):
    h, w = img.shape[:2]
    left = max(rect.left, 0)
    top = max(rect.top, 0)
    right = min(rect.right, w)
    bottom = min(rect.bottom, h)
    if right <= left or bottom <= top:
        return
    color = np.asarray(color, dtype=np.uint8)
    t = min(STROKE, bottom - top, right - left)
    img[top:top + t, left:right] = color
    img[bottom - t:bottom, left:right] = color
    img[top:bottom, left:left + t] = color
    img[top:bottom, right - t:right] = color


def render_overlay(img, portfolio, baseline=None):
    """Copy of the image with level-colored crop outlines.

    Portfolio levels are drawn in order (later levels over earlier ones),
    then baseline windows in their own color.
    """
    out = img.copy()
    for crop in (portfolio.crops if portfolio is not None else ()):
        _stroke_rect(out, crop.rect, LEVEL_COLORS[crop.level % len(LEVEL_COLORS)])
    for win in baseline or []:
        rect = win.rect if hasattr(win, "rect") else win
        _stroke_rect(out, rect, BASELINE_COLOR)
    return out
