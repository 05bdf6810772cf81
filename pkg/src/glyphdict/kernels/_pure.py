"""Vectorized numpy implementations of the binary-morphology kernels.

Semantics are shared bit-for-bit with the compiled backend in _fast.pyx:
all kernels are pure boolean-lattice operations with background padding, so
both backends must produce identical uint8 output for identical input.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def _neighbors(p: np.ndarray):
    # P2..P9 clockwise from north, on a 1-px padded array.
    return (
        p[:-2, 1:-1],  # N
        p[:-2, 2:],    # NE
        p[1:-1, 2:],   # E
        p[2:, 2:],     # SE
        p[2:, 1:-1],   # S
        p[2:, :-2],    # SW
        p[1:-1, :-2],  # W
        p[:-2, :-2],   # NW
    )


def _thin_pass(img: np.ndarray, max_sweeps: int) -> np.ndarray:
    sweeps = 0
    while True:
        changed = False
        for step in (0, 1):
            p = np.pad(img, 1, constant_values=0)
            n = _neighbors(p)
            core = img.astype(bool)
            b = sum(x.astype(np.uint8) for x in n)
            cyc = n + (n[0],)
            a = sum(((cyc[i] == 0) & (cyc[i + 1] == 1)).astype(np.uint8) for i in range(8))
            p2, _, p4, _, p6, _, p8, _ = n
            cond = core & (b >= 2) & (b <= 6) & (a == 1)
            if step == 0:
                cond &= ~((p2 == 1) & (p4 == 1) & (p6 == 1))
                cond &= ~((p4 == 1) & (p6 == 1) & (p8 == 1))
            else:
                cond &= ~((p2 == 1) & (p4 == 1) & (p8 == 1))
                cond &= ~((p2 == 1) & (p6 == 1) & (p8 == 1))
            if cond.any():
                img = np.where(cond, np.uint8(0), img)
                changed = True
        sweeps += 1
        if not changed or sweeps >= max_sweeps:
            return img


def thin(mask: np.ndarray, sweeps: int = 0) -> np.ndarray:
    """Zhang-Suen thinning. sweeps=0 runs to convergence; sweeps=n stops
    after n full (two-subiteration) sweeps."""
    img = np.ascontiguousarray(mask, dtype=np.uint8)
    limit = sweeps if sweeps > 0 else 1 << 30
    return _thin_pass(img.copy(), limit)


def erode_cross(mask: np.ndarray, iterations: int = 1) -> np.ndarray:
    """Binary erosion with the 3x3 cross element; outside counts as background."""
    img = np.ascontiguousarray(mask, dtype=np.uint8)
    for _ in range(iterations):
        p = np.pad(img, 1, constant_values=0)
        img = (
            img.astype(bool)
            & p[:-2, 1:-1].astype(bool)
            & p[2:, 1:-1].astype(bool)
            & p[1:-1, :-2].astype(bool)
            & p[1:-1, 2:].astype(bool)
        ).astype(np.uint8)
    return img


def _disc_offsets(radius: int) -> list[tuple[int, int]]:
    out = []
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dx * dx + dy * dy <= radius * radius:
                out.append((dy, dx))
    return out


def dilate_disc(mask: np.ndarray, radius: int) -> np.ndarray:
    """Binary dilation by a Euclidean disc of the given radius."""
    img = np.ascontiguousarray(mask, dtype=np.uint8)
    if radius <= 0:
        return img.copy()
    h, w = img.shape
    p = np.pad(img, radius, constant_values=0)
    acc = np.zeros((h, w), dtype=bool)
    for dy, dx in _disc_offsets(radius):
        acc |= p[radius + dy : radius + dy + h, radius + dx : radius + dx + w].astype(bool)
    return acc.astype(np.uint8)


def erode_disc(mask: np.ndarray, radius: int) -> np.ndarray:
    """Binary erosion by a Euclidean disc; outside counts as background."""
    img = np.ascontiguousarray(mask, dtype=np.uint8)
    if radius <= 0:
        return img.copy()
    h, w = img.shape
    p = np.pad(img, radius, constant_values=0)
    acc = np.ones((h, w), dtype=bool)
    for dy, dx in _disc_offsets(radius):
        acc &= p[radius + dy : radius + dy + h, radius + dx : radius + dx + w].astype(bool)
    return acc.astype(np.uint8)


def label_components(mask: np.ndarray) -> tuple[np.ndarray, int]:
    """8-connected component labeling; labels assigned in raster-scan order."""
    img = np.ascontiguousarray(mask, dtype=np.uint8)
    h, w = img.shape
    labels = np.zeros((h, w), dtype=np.int32)
    count = 0
    stack: list[tuple[int, int]] = []
    for y, x in np.argwhere(img != 0):
        if labels[y, x]:
            continue
        count += 1
        labels[y, x] = count
        stack.append((y, x))
        while stack:
            cy, cx = stack.pop()
            for ny in range(max(cy - 1, 0), min(cy + 2, h)):
                for nx in range(max(cx - 1, 0), min(cx + 2, w)):
                    if img[ny, nx] and labels[ny, nx] == 0:
                        labels[ny, nx] = count
                        stack.append((ny, nx))
    return labels, count
