"""Synthetic test images and the Haar basis in which they are sparse."""

from __future__ import annotations

import numpy as np

__all__ = ["haar_matrix", "haar2_matrix", "piecewise_constant_image"]


def haar_matrix(d: int) -> np.ndarray:
    """Orthonormal multilevel Haar analysis matrix of size ``d`` (a power of two).

    Row 0 is the scaled mean; the remaining rows are differences at all scales.
    """
    if d < 1 or d & (d - 1):
        raise ValueError("d must be a power of two")
    h = np.ones((1, 1))
    while h.shape[0] < d:
        k = h.shape[0]
        coarse = np.kron(h, [1.0, 1.0])
        detail = np.kron(np.eye(k), [1.0, -1.0])
        h = np.vstack([coarse, detail]) / np.sqrt(2.0)
    return h


def haar2_matrix(d: int) -> np.ndarray:
    """2-D separable Haar analysis on row-major vectorized ``d x d`` images."""
    h = haar_matrix(d)
    return np.kron(h, h)


def piecewise_constant_image(d: int, pieces: int, seed: int, min_size: int = 4) -> np.ndarray:
    """Sum of ``pieces`` constant dyadic squares on a ``d x d`` grid.

    Squares have side ``min_size`` or larger powers of two and sit on
    multiples of their side, which keeps the image sparse in the Haar basis.
    Levels are integers in ``1..255``; the image peak is at most 255.
    """
    if d < min_size:
        raise ValueError("d must be >= min_size")
    rng = np.random.default_rng(seed)
    img = np.zeros((d, d))
    sides = [min_size << j for j in range(int(np.log2(d // min_size)) + 1)]
    for _ in range(pieces):
        side = int(rng.choice(sides))
        r, c = (int(rng.integers(d // side)) * side for _ in range(2))
        img[r : r + side, c : c + side] += rng.integers(1, 64)
    return np.minimum(img, 255.0)
