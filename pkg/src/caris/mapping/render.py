"""Grayscale rendering of the occupancy grid for the console map view."""

from __future__ import annotations

import io

import numpy as np
from PIL import Image

FREE_PIXEL = 255
UNKNOWN_PIXEL = 128
OCCUPIED_PIXEL = 0


def classify(grid) -> np.ndarray:
    """Per-cell trinary classification: 0 occupied, 128 unknown, 255 free."""
    t = grid.params.threshold
    pixels = np.full((grid.height, grid.width), UNKNOWN_PIXEL, dtype=np.uint8)
    pixels[grid.logodds <= -t] = FREE_PIXEL
    pixels[grid.logodds >= t] = OCCUPIED_PIXEL
    return pixels


def render_map(grid) -> bytes:
    """One pixel per cell; row index follows cell y directly (no vertical flip)."""
    img = Image.fromarray(classify(grid), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return buf.getvalue()
