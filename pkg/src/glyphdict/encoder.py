"""Shared feature extractor mapping glyphs into a common embedding space.

The reference backend is a handcrafted 438-dim descriptor: coarse intensity
block means, unsigned gradient-orientation histograms over a cell grid, and
a few global shape statistics, L2-normalized. Orientation bins are
pi-periodic so ink/background polarity cannot affect structure matching.
Any object with `embed(glyph) -> np.ndarray`, `dim` and `encoder_id` can be
substituted without touching retrieval.
"""

from __future__ import annotations

import struct

import numpy as np

from .glyph import Glyph

BLOCK_GRID = 12
CELL_GRID = 6
ORIENT_BINS = 8
GLOBAL_DIMS = 6
DIM = BLOCK_GRID * BLOCK_GRID + CELL_GRID * CELL_GRID * ORIENT_BINS + GLOBAL_DIMS  # 438


class EmptyGlyph(ValueError):
    """Cannot embed a glyph with no ink."""


class BlockGradEncoder:
    """Reference descriptor backend; stateless and deterministic."""

    encoder_id = "blockgrad-v1"
    dim = DIM

    def embed(self, g: Glyph) -> np.ndarray:
        return embed(g)


def embed(g: Glyph) -> np.ndarray:
    """438-dim unit-norm descriptor of one glyph.

    Summation runs in fixed row-major order over float64 so repeated calls
    are bit-identical; the result is cast to float32 after normalization.
    """
    size = g.size
    if size % BLOCK_GRID or size % CELL_GRID:
        raise ValueError(f"canvas size {size} must be divisible by {BLOCK_GRID} and {CELL_GRID}")
    px = g.pixels.astype(np.float64)
    if px.sum() == 0.0:
        raise EmptyGlyph("glyph has no ink")

    block = size // BLOCK_GRID
    means = px.reshape(BLOCK_GRID, block, BLOCK_GRID, block).mean(axis=(1, 3))

    pad = np.pad(px, 1, mode="edge")
    gx = (pad[1:-1, 2:] - pad[1:-1, :-2]) * 0.5
    gy = (pad[2:, 1:-1] - pad[:-2, 1:-1]) * 0.5
    mag = np.hypot(gx, gy)
    theta = np.mod(np.arctan2(gy, gx), np.pi)
    bins = np.minimum((theta / (np.pi / ORIENT_BINS)).astype(np.int64), ORIENT_BINS - 1)

    cell = size // CELL_GRID
    cy = np.arange(size) // cell
    cx = np.arange(size) // cell
    flat_idx = (cy[:, None] * CELL_GRID + cx[None, :]) * ORIENT_BINS + bins
    hist = np.bincount(flat_idx.ravel(), weights=mag.ravel(), minlength=CELL_GRID * CELL_GRID * ORIENT_BINS)

    # intensity-weighted moments: identical to mask moments for binary
    # glyphs, still defined for grayscale (degraded) ones
    total = px.sum()
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    cx_m = (px * xs).sum() / total
    cy_m = (px * ys).sum() / total
    mu20 = (px * (xs - cx_m) ** 2).sum() / total / (size * size)
    mu02 = (px * (ys - cy_m) ** 2).sum() / total / (size * size)
    mu11 = (px * (xs - cx_m) * (ys - cy_m)).sum() / total / (size * size)
    stats = np.array(
        [total / (size * size), cx_m / (size - 1), cy_m / (size - 1), mu20, mu02, mu11],
        dtype=np.float64,
    )

    vec = np.concatenate([means.ravel(), hist, stats])
    norm = np.sqrt((vec * vec).sum())
    return (vec / norm).astype(np.float32)


# -- embedding store ---------------------------------------------------------

STORE_MAGIC = b"OBSE"
STORE_VERSION = 1


def save_store(path, embeddings: np.ndarray) -> None:
    """Write the binary embedding store: magic, u32 version, u32 dim,
    u64 count, then count*dim little-endian float32 rows."""
    arr = np.ascontiguousarray(embeddings, dtype="<f4")
    if arr.ndim != 2:
        raise ValueError("embeddings must be a 2-D array")
    count, dim = arr.shape
    with open(path, "wb") as fh:
        fh.write(STORE_MAGIC)
        fh.write(struct.pack("<IIQ", STORE_VERSION, dim, count))
        fh.write(arr.tobytes())


def load_store(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != STORE_MAGIC:
            raise ValueError(f"bad store magic {magic!r}")
        version, dim, count = struct.unpack("<IIQ", fh.read(16))
        if version != STORE_VERSION:
            raise ValueError(f"unsupported store version {version}")
        data = fh.read(count * dim * 4)
    if len(data) != count * dim * 4:
        raise ValueError("truncated embedding store")
    return np.frombuffer(data, dtype="<f4").reshape(count, dim).copy()
