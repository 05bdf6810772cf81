"""Field-realistic degradation operators at three severities.

Blur and Erode are deterministic functions of the input; Noise and Mask are
bit-deterministic given the spec seed. Output is intentionally NOT
re-normalized: degradation models capture conditions downstream of
normalization, and the decipher path re-normalizes on entry anyway.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .glyph import Glyph, from_array, from_mask
from .rng import Rng, gauss_field, hash64


class Kind(Enum):
    BLUR = "blur"
    NOISE = "noise"
    ERODE = "erode"
    MASK = "mask"


BLUR_SIGMA = {1: 0.8, 2: 1.6, 3: 2.4}
NOISE_SIGMA = {1: 0.05, 2: 0.15, 3: 0.30}
MASK_AREA = {1: 0.10, 2: 0.20, 3: 0.35}


@dataclass(frozen=True)
class DegradationSpec:
    kind: Kind
    severity: int
    seed: int = 0

    def __post_init__(self):
        if self.severity not in (1, 2, 3):
            raise ValueError("severity must be 1, 2 or 3")


def _gaussian_kernel(sigma: float) -> np.ndarray:
    radius = math.ceil(3.0 * sigma)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(xs * xs) / (2.0 * sigma * sigma))
    return k / k.sum()


def _blur(px: np.ndarray, sigma: float) -> np.ndarray:
    k = _gaussian_kernel(sigma)
    radius = (len(k) - 1) // 2
    # separable convolution with edge-clamped padding
    padded = np.pad(px, ((0, 0), (radius, radius)), mode="edge")
    out = np.zeros_like(px)
    for i, w in enumerate(k):
        out += w * padded[:, i : i + px.shape[1]]
    padded = np.pad(out, ((radius, radius), (0, 0)), mode="edge")
    out2 = np.zeros_like(px)
    for i, w in enumerate(k):
        out2 += w * padded[i : i + px.shape[0], :]
    return out2


def degrade(g: Glyph, spec: DegradationSpec) -> Glyph:
    px = g.pixels.astype(np.float64)
    size = g.size
    if spec.kind is Kind.BLUR:
        return from_array(np.clip(_blur(px, BLUR_SIGMA[spec.severity]), 0.0, 1.0))
    if spec.kind is Kind.NOISE:
        noise = NOISE_SIGMA[spec.severity] * gauss_field(hash64(spec.seed, "noise"), size * size)
        return from_array(np.clip(px + noise.reshape(size, size), 0.0, 1.0))
    if spec.kind is Kind.ERODE:
        return from_mask(kernels.erode_cross(g.mask(), iterations=spec.severity))
    if spec.kind is Kind.MASK:
        rng = Rng(hash64(spec.seed, "mask"))
        area = MASK_AREA[spec.severity] * size * size
        aspect = rng.uniform(0.5, 2.0)
        h = max(1, min(size, int(round(math.sqrt(area / aspect)))))
        w = max(1, min(size, int(round(area / h))))
        y0 = rng.below(size - h + 1)
        x0 = rng.below(size - w + 1)
        out = px.copy()
        out[y0 : y0 + h, x0 : x0 + w] = 0.0
        return from_array(out)
    raise ValueError(f"unknown kind {spec.kind!r}")


def all_conditions(seed: int = 0) -> list[DegradationSpec]:
    """The 12 suite conditions (4 kinds x 3 severities)."""
    return [
        DegradationSpec(kind, severity, seed)
        for kind in Kind
        for severity in (1, 2, 3)
    ]
