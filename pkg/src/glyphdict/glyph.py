"""Raster glyph representation and the pixel-level primitives on it.

A Glyph is a square float array with ink-positive convention: 1.0 is ink,
0.0 is background. Disk images use the opposite, conventional polarity
(dark ink on light paper); the I/O helpers convert at the boundary.
All operations here are deterministic: thresholding and resampling follow
fixed integer/float rules with no accumulation-order ambiguity.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from PIL import Image

from . import kernels

CANVAS = 96
FILL_FRACTION = 0.8  # normalized ink bbox occupies this share of the canvas


class EmptyImage(ValueError):
    """No ink remained after thresholding."""


@dataclass(frozen=True)
class Glyph:
    pixels: np.ndarray  # (size, size) float32 in [0,1], 1.0 = ink

    def __post_init__(self):
        p = self.pixels
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError(f"glyph must be square, got shape {p.shape}")
        p.setflags(write=False)

    @property
    def size(self) -> int:
        return self.pixels.shape[0]

    def mask(self) -> np.ndarray:
        """Binary ink mask (uint8), thresholded at 0.5."""
        return (self.pixels >= 0.5).astype(np.uint8)

    def ink_count(self) -> int:
        return int(self.mask().sum())

    def is_empty(self) -> bool:
        return self.ink_count() == 0

    def same_bytes(self, other: "Glyph") -> bool:
        return self.pixels.tobytes() == other.pixels.tobytes()


def from_array(a: np.ndarray) -> Glyph:
    return Glyph(np.ascontiguousarray(a, dtype=np.float32))


def from_mask(mask: np.ndarray) -> Glyph:
    return from_array(mask.astype(np.float32))


def _otsu_threshold(levels: np.ndarray) -> int:
    """Otsu's threshold over a uint8 image; returns t with classes <=t / >t.

    Integer histogram arithmetic only, so the split point is exact and
    platform-independent. Raises EmptyImage when the image is uniform.
    """
    hist = np.bincount(levels.ravel(), minlength=256).astype(np.int64)
    total = int(hist.sum())
    if total == 0 or int((hist > 0).sum()) < 2:
        raise EmptyImage("image has no intensity variation to threshold")
    bins = np.arange(256, dtype=np.int64)
    w0 = np.cumsum(hist)
    sum0 = np.cumsum(hist * bins)
    sum_all = int(sum0[-1])
    w1 = total - w0
    valid = (w0 > 0) & (w1 > 0)
    mu0 = np.where(valid, sum0 / np.maximum(w0, 1), 0.0)
    mu1 = np.where(valid, (sum_all - sum0) / np.maximum(w1, 1), 0.0)
    between = np.where(valid, w0.astype(np.float64) * w1 * (mu0 - mu1) ** 2, -1.0)
    return int(np.argmax(between))


def binarize(levels: np.ndarray) -> np.ndarray:
    """Otsu split of a uint8 dark-on-light image into an ink mask.

    Ink starts as the darker class; if that would cover more than half the
    image the classes swap, so ink is always the minority class.
    """
    t = _otsu_threshold(levels)
    ink = (levels <= t).astype(np.uint8)
    if int(ink.sum()) * 2 > ink.size:
        ink = 1 - ink
    if ink.sum() == 0:
        raise EmptyImage("no ink after thresholding")
    return ink


def _bilinear_resize(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Bilinear resample of a float64 image, pixel-center aligned."""
    in_h, in_w = src.shape
    if in_h == out_h and in_w == out_w:
        return src.copy()
    ys = (np.arange(out_h, dtype=np.float64) + 0.5) * (in_h / out_h) - 0.5
    xs = (np.arange(out_w, dtype=np.float64) + 0.5) * (in_w / out_w) - 0.5
    ys = np.clip(ys, 0.0, in_h - 1.0)
    xs = np.clip(xs, 0.0, in_w - 1.0)
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    a = src[np.ix_(y0, x0)]
    b = src[np.ix_(y0, x1)]
    c = src[np.ix_(y1, x0)]
    d = src[np.ix_(y1, x1)]
    return a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx + c * fy * (1 - fx) + d * fy * fx


def normalize_mask(ink: np.ndarray, size: int = CANVAS) -> Glyph:
    """Center-and-scale an ink mask onto the standard canvas.

    Crops to the ink bounding box, scales isotropically so the larger side
    fills FILL_FRACTION of the canvas, centers, and re-thresholds at 0.5.
    """
    ys, xs = np.nonzero(ink)
    if len(ys) == 0:
        raise EmptyImage("no ink to normalize")
    crop = ink[ys.min() : ys.max() + 1, xs.min() : xs.max() + 1].astype(np.float64)
    h, w = crop.shape
    target = int(round(FILL_FRACTION * size))
    scale = target / max(h, w)
    new_h = max(1, int(round(h * scale)))
    new_w = max(1, int(round(w * scale)))
    resized = _bilinear_resize(crop, new_h, new_w)
    out = np.zeros((size, size), dtype=np.float32)
    oy = (size - new_h) // 2
    ox = (size - new_w) // 2
    out[oy : oy + new_h, ox : ox + new_w] = (resized >= 0.5).astype(np.float32)
    if out.sum() == 0:
        raise EmptyImage("ink vanished during resampling")
    return from_array(out)


def normalize(image: np.ndarray, size: int = CANVAS) -> Glyph:
    """Normalize an arbitrary-size dark-on-light grayscale raster.

    Accepts uint8 or float arrays (float interpreted on [0,1]).
    """
    if image.dtype.kind == "f":
        levels = np.clip(np.rint(image * 255.0), 0, 255).astype(np.uint8)
    else:
        levels = image.astype(np.uint8)
    return normalize_mask(binarize(levels), size)


def skeletonize(g: Glyph) -> Glyph:
    """Thin ink to a 1-px skeleton (Zhang-Suen); topology is preserved."""
    return from_mask(kernels.thin(g.mask()))


def restroke(skeleton: Glyph, width: int) -> Glyph:
    """Re-stroke a skeleton at uniform weight: dilation by a disc of
    radius width // 2."""
    if not 1 <= width <= 7:
        raise ValueError("width must be in [1, 7]")
    return from_mask(kernels.dilate_disc(skeleton.mask(), width // 2))


Rect = tuple[int, int, int, int]  # (x0, y0, x1, y1), half-open pixel coords


def ink_fraction(g: Glyph, region: Rect) -> float:
    """Share of the glyph's ink that falls inside the region; 0 when empty."""
    x0, y0, x1, y1 = region
    if not (0 <= x0 <= x1 <= g.size and 0 <= y0 <= y1 <= g.size):
        raise ValueError(f"region {region} not contained in canvas")
    m = g.mask()
    total = int(m.sum())
    if total == 0:
        return 0.0
    return int(m[y0:y1, x0:x1].sum()) / total


# -- skeleton analysis -------------------------------------------------------

_NEIGHBOR_OFFSETS = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]


def _degree_map(mask: np.ndarray) -> np.ndarray:
    p = np.pad(mask, 1, constant_values=0).astype(np.int32)
    deg = np.zeros_like(p)
    for dy, dx in _NEIGHBOR_OFFSETS:
        deg += np.roll(np.roll(p, dy, axis=0), dx, axis=1)
    return (deg[1:-1, 1:-1] * mask).astype(np.int32)


def prune_spurs(skeleton_mask: np.ndarray, min_length: int) -> np.ndarray:
    """Remove skeleton spurs shorter than min_length.

    A spur is traced from an endpoint (degree 1) until it hits a junction
    (degree >= 3); if fewer than min_length pixels were traced, they are
    erased. Whole components that are simple paths shorter than min_length
    are erased entirely.
    """
    mask = skeleton_mask.astype(np.uint8).copy()
    changed = True
    while changed:
        changed = False
        deg = _degree_map(mask)
        endpoints = np.argwhere((mask == 1) & (deg == 1))
        for ey, ex in endpoints:
            if mask[ey, ex] == 0:
                continue
            path = [(int(ey), int(ex))]
            py, px = -1, -1
            cy, cx = int(ey), int(ex)
            hit_junction = False
            while len(path) < min_length:
                nxt = None
                for dy, dx in _NEIGHBOR_OFFSETS:
                    ny, nx = cy + dy, cx + dx
                    if 0 <= ny < mask.shape[0] and 0 <= nx < mask.shape[1]:
                        if mask[ny, nx] and (ny, nx) != (py, px):
                            if deg[ny, nx] >= 3:
                                hit_junction = True
                                nxt = None
                                break
                            if nxt is None:
                                nxt = (ny, nx)
                if hit_junction or nxt is None:
                    break
                py, px = cy, cx
                cy, cx = nxt
                path.append((cy, cx))
            if (hit_junction or len(path) < min_length) and len(path) < min_length:
                for y, x in path:
                    mask[y, x] = 0
                changed = True
    # Drop isolated dots and fragments below min_length.
    labels, count = kernels.label_components(mask)
    if count:
        sizes = np.bincount(labels.ravel(), minlength=count + 1)
        for lab in range(1, count + 1):
            if sizes[lab] < min_length:
                mask[labels == lab] = 0
    return mask


# -- geometric warps ---------------------------------------------------------


def affine_warp(g: Glyph, rotation: float, shear: float, scale: float) -> Glyph:
    """Affine transform about the canvas center with binary output.

    rotation in radians, shear along x, isotropic scale. Inverse-mapped
    bilinear sampling, thresholded at 0.5.
    """
    size = g.size
    c = (size - 1) / 2.0
    cos_r, sin_r = np.cos(rotation), np.sin(rotation)
    # forward = rot(scale) . shear, inverted once and applied to pixel grids
    fwd = np.array(
        [[scale * cos_r, scale * (cos_r * shear - sin_r)], [scale * sin_r, scale * (sin_r * shear + cos_r)]],
        dtype=np.float64,
    )
    inv = np.linalg.inv(fwd)
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    dx = xs - c
    dy = ys - c
    sx = inv[0, 0] * dx + inv[0, 1] * dy + c
    sy = inv[1, 0] * dx + inv[1, 1] * dy + c
    return from_mask(_sample_bilinear(g.pixels.astype(np.float64), sy, sx) >= 0.5)


def displace(g: Glyph, dy_field: np.ndarray, dx_field: np.ndarray) -> Glyph:
    """Warp by a per-pixel displacement field (inverse mapping), binary out."""
    size = g.size
    ys, xs = np.mgrid[0:size, 0:size].astype(np.float64)
    return from_mask(
        _sample_bilinear(g.pixels.astype(np.float64), ys + dy_field, xs + dx_field) >= 0.5
    )


def _sample_bilinear(src: np.ndarray, sy: np.ndarray, sx: np.ndarray) -> np.ndarray:
    h, w = src.shape
    sy = np.clip(sy, 0.0, h - 1.0)
    sx = np.clip(sx, 0.0, w - 1.0)
    y0 = np.floor(sy).astype(np.int64)
    x0 = np.floor(sx).astype(np.int64)
    y1 = np.minimum(y0 + 1, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    fy = sy - y0
    fx = sx - x0
    a = src[y0, x0]
    b = src[y0, x1]
    c = src[y1, x0]
    d = src[y1, x1]
    return a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx + c * fy * (1 - fx) + d * fy * fx


def translate(g: Glyph, dy: int, dx: int) -> Glyph:
    """Integer shift with background fill."""
    out = np.zeros_like(g.pixels)
    size = g.size
    src_y0, src_x0 = max(0, -dy), max(0, -dx)
    dst_y0, dst_x0 = max(0, dy), max(0, dx)
    hh = size - abs(dy)
    ww = size - abs(dx)
    if hh > 0 and ww > 0:
        out[dst_y0 : dst_y0 + hh, dst_x0 : dst_x0 + ww] = g.pixels[src_y0 : src_y0 + hh, src_x0 : src_x0 + ww]
    return from_array(out)


# -- disk I/O ----------------------------------------------------------------


def to_levels(g: Glyph) -> np.ndarray:
    """Glyph to conventional dark-on-light uint8 levels."""
    return np.clip(np.rint((1.0 - g.pixels.astype(np.float64)) * 255.0), 0, 255).astype(np.uint8)


def save_png(g: Glyph, path) -> None:
    Image.fromarray(to_levels(g), mode="L").save(path, format="PNG")


def png_bytes(g: Glyph) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(to_levels(g), mode="L").save(buf, format="PNG")
    return buf.getvalue()


def save_pgm(g: Glyph, path) -> None:
    levels = to_levels(g)
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (levels.shape[1], levels.shape[0]))
        fh.write(levels.tobytes())


def load_levels(path) -> np.ndarray:
    """Read a PNG or PGM (P5) file as uint8 grayscale levels."""
    with open(path, "rb") as fh:
        head = fh.read(2)
        fh.seek(0)
        data = fh.read()
    if head == b"P5":
        return _parse_pgm(data)
    with Image.open(io.BytesIO(data)) as im:
        return np.asarray(im.convert("L"), dtype=np.uint8)


def _parse_pgm(data: bytes) -> np.ndarray:
    pos = 0
    fields = []
    while len(fields) < 4:
        if data[pos : pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        end = pos
        while end < len(data) and data[end : end + 1] not in b" \t\r\n":
            end += 1
        if end > pos:
            fields.append(data[pos:end])
        pos = end + 1
    magic, w, h, maxval = fields[0], int(fields[1]), int(fields[2]), int(fields[3])
    if magic != b"P5" or maxval != 255:
        raise ValueError("only 8-bit P5 PGM is supported")
    return np.frombuffer(data[pos : pos + w * h], dtype=np.uint8).reshape(h, w)


def load_glyph(path, size: int = CANVAS) -> Glyph:
    """Load and normalize a glyph image file."""
    return normalize(load_levels(path), size)


def load_glyph_raw(path) -> Glyph:
    """Load a pre-normalized glyph image without re-normalizing."""
    levels = load_levels(path)
    return from_array((255 - levels.astype(np.float64)) / 255.0)
