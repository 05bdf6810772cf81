# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled twins of the binary-morphology kernels in _pure.py.

Each function must match the pure backend bit-for-bit; the parity test in
tests/test_kernels.py enforces it on random masks.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def thin(mask, int sweeps=0):
    """Zhang-Suen thinning; sweeps=0 runs to convergence."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] img = np.ascontiguousarray(mask, dtype=np.uint8).copy()
    cdef int h = img.shape[0]
    cdef int w = img.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] kill = np.zeros((h, w), dtype=np.uint8)
    cdef int limit = sweeps if sweeps > 0 else 1 << 30
    cdef int step, y, x, b, a, i, done_sweeps
    cdef int changed, any_kill
    cdef int n[9]
    done_sweeps = 0
    while True:
        changed = 0
        for step in range(2):
            any_kill = 0
            for y in range(h):
                for x in range(w):
                    if img[y, x] == 0:
                        continue
                    # P2..P9 clockwise from north; outside is background.
                    n[0] = img[y - 1, x] if y > 0 else 0
                    n[1] = img[y - 1, x + 1] if (y > 0 and x < w - 1) else 0
                    n[2] = img[y, x + 1] if x < w - 1 else 0
                    n[3] = img[y + 1, x + 1] if (y < h - 1 and x < w - 1) else 0
                    n[4] = img[y + 1, x] if y < h - 1 else 0
                    n[5] = img[y + 1, x - 1] if (y < h - 1 and x > 0) else 0
                    n[6] = img[y, x - 1] if x > 0 else 0
                    n[7] = img[y - 1, x - 1] if (y > 0 and x > 0) else 0
                    n[8] = n[0]
                    b = 0
                    a = 0
                    for i in range(8):
                        b += n[i]
                        if n[i] == 0 and n[i + 1] == 1:
                            a += 1
                    if b < 2 or b > 6 or a != 1:
                        continue
                    if step == 0:
                        if (n[0] and n[2] and n[4]) or (n[2] and n[4] and n[6]):
                            continue
                    else:
                        if (n[0] and n[2] and n[6]) or (n[0] and n[4] and n[6]):
                            continue
                    kill[y, x] = 1
                    any_kill = 1
            if any_kill:
                changed = 1
                for y in range(h):
                    for x in range(w):
                        if kill[y, x]:
                            img[y, x] = 0
                            kill[y, x] = 0
        done_sweeps += 1
        if changed == 0 or done_sweeps >= limit:
            return np.asarray(img)


def erode_cross(mask, int iterations=1):
    """Binary erosion with the 3x3 cross element; outside is background."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] img = np.ascontiguousarray(mask, dtype=np.uint8).copy()
    cdef int h = img.shape[0]
    cdef int w = img.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((h, w), dtype=np.uint8)
    cdef int it, y, x
    for it in range(iterations):
        for y in range(h):
            for x in range(w):
                if (
                    img[y, x]
                    and (y > 0 and img[y - 1, x])
                    and (y < h - 1 and img[y + 1, x])
                    and (x > 0 and img[y, x - 1])
                    and (x < w - 1 and img[y, x + 1])
                ):
                    out[y, x] = 1
                else:
                    out[y, x] = 0
        img, out = out, img
    return np.asarray(img)


def _disc_offsets(int radius):
    offs = []
    cdef int dy, dx
    for dy in range(-radius, radius + 1):
        for dx in range(-radius, radius + 1):
            if dx * dx + dy * dy <= radius * radius:
                offs.append((dy, dx))
    return offs


def dilate_disc(mask, int radius):
    """Binary dilation by a Euclidean disc."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] img = np.ascontiguousarray(mask, dtype=np.uint8)
    if radius <= 0:
        return img.copy()
    cdef int h = img.shape[0]
    cdef int w = img.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((h, w), dtype=np.uint8)
    cdef int y, x, dy, dx, ny, nx
    offs = _disc_offsets(radius)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] off = np.asarray(offs, dtype=np.int32)
    cdef int m = off.shape[0]
    cdef int i
    for y in range(h):
        for x in range(w):
            if img[y, x]:
                for i in range(m):
                    ny = y + off[i, 0]
                    nx = x + off[i, 1]
                    if 0 <= ny < h and 0 <= nx < w:
                        out[ny, nx] = 1
    return np.asarray(out)


def erode_disc(mask, int radius):
    """Binary erosion by a Euclidean disc; outside is background."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] img = np.ascontiguousarray(mask, dtype=np.uint8)
    if radius <= 0:
        return img.copy()
    cdef int h = img.shape[0]
    cdef int w = img.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((h, w), dtype=np.uint8)
    offs = _disc_offsets(radius)
    cdef cnp.ndarray[cnp.int32_t, ndim=2] off = np.asarray(offs, dtype=np.int32)
    cdef int m = off.shape[0]
    cdef int y, x, i, ny, nx, keep
    for y in range(h):
        for x in range(w):
            if not img[y, x]:
                continue
            keep = 1
            for i in range(m):
                ny = y + off[i, 0]
                nx = x + off[i, 1]
                if ny < 0 or ny >= h or nx < 0 or nx >= w or img[ny, nx] == 0:
                    keep = 0
                    break
            out[y, x] = keep
    return np.asarray(out)


def label_components(mask):
    """8-connected component labeling; labels assigned in raster-scan order."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] img = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef int h = img.shape[0]
    cdef int w = img.shape[1]
    cdef cnp.ndarray[cnp.int32_t, ndim=2] labels = np.zeros((h, w), dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] stack_y = np.empty(h * w, dtype=np.int32)
    cdef cnp.ndarray[cnp.int32_t, ndim=1] stack_x = np.empty(h * w, dtype=np.int32)
    cdef int count = 0
    cdef int y, x, cy, cx, ny, nx, top
    for y in range(h):
        for x in range(w):
            if img[y, x] == 0 or labels[y, x] != 0:
                continue
            count += 1
            labels[y, x] = count
            stack_y[0] = y
            stack_x[0] = x
            top = 1
            while top > 0:
                top -= 1
                cy = stack_y[top]
                cx = stack_x[top]
                for ny in range(cy - 1 if cy > 0 else 0, (cy + 2) if cy < h - 1 else h):
                    for nx in range(cx - 1 if cx > 0 else 0, (cx + 2) if cx < w - 1 else w):
                        if img[ny, nx] and labels[ny, nx] == 0:
                            labels[ny, nx] = count
                            stack_y[top] = ny
                            stack_x[top] = nx
                            top += 1
    return np.asarray(labels), count
