"""Association primitives: box overlap and minimum-cost assignment."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from caris.errors import Infeasible

Bbox = tuple[float, float, float, float]  # cx, cy, w, h


def iou(a: Bbox, b: Bbox) -> float:
    """Intersection over union of two center-format boxes."""
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    if aw <= 0 or ah <= 0 or bw <= 0 or bh <= 0:
        raise ValueError("boxes must have positive extents")
    ix = min(ax + aw / 2, bx + bw / 2) - max(ax - aw / 2, bx - bw / 2)
    iy = min(ay + ah / 2, by + bh / 2) - max(ay - ah / 2, by - bh / 2)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    return inter / (aw * ah + bw * bh - inter)


def hungarian(cost) -> tuple[list[tuple[int, int]], float]:
    """Minimum-total-cost assignment of min(n, m) row/column pairs.

    +inf entries mark forbidden pairs; raises Infeasible when every full
    assignment would use one. Backed by scipy's solver with a finite
    sentinel large enough that forbidden pairs are chosen only when
    unavoidable.
    """
    matrix = np.asarray(cost, dtype=np.float64)
    if matrix.ndim != 2:
        raise ValueError("cost must be a 2D matrix")
    if matrix.size == 0:
        return [], 0.0
    if np.isnan(matrix).any() or np.isneginf(matrix).any():
        raise ValueError("cost entries must be finite or +inf")
    forbidden = np.isinf(matrix)
    finite_sum = float(np.abs(matrix[~forbidden]).sum()) if (~forbidden).any() else 0.0
    big = 2.0 * finite_sum + 1.0
    solvable = np.where(forbidden, big, matrix)
    rows, cols = linear_sum_assignment(solvable)
    if forbidden[rows, cols].any():
        raise Infeasible("no full assignment avoids forbidden pairs")
    total = float(matrix[rows, cols].sum())
    return list(zip(rows.tolist(), cols.tolist())), total


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def max_gallery_similarity(embedding: np.ndarray, gallery) -> float:
    """Best cosine similarity between an embedding and any gallery entry."""
    best = -math.inf
    for g in gallery:
        best = max(best, cosine_similarity(embedding, g))
    return best if best != -math.inf else 0.0
