"""Evaluation metrics: Top-N accuracy, SSIM, L1, and a diagonal-Gaussian
Frechet distance computed in the artifact's own embedding space.

The Frechet measure is deliberately labeled "embedding-Frechet (diagonal)"
in every report: it is an analogue computed from per-dimension means and
variances of our embeddings, not a score from any pretrained network, and
its absolute values are not comparable to published figures.
"""

from __future__ import annotations

import numpy as np

from .glyph import Glyph

TOP_N_LEVELS = (1, 10, 20, 50, 100)

FRECHET_LABEL = "embedding-Frechet (diagonal)"


class LengthMismatch(ValueError):
    pass


class SizeMismatch(ValueError):
    pass


class InsufficientSamples(ValueError):
    pass


def topn_accuracy(rankings: list[list[str]], truths: list[str], n: int) -> float:
    """Fraction of samples whose truth is among the first n ranked labels.

    Failed queries (empty ranking) count as misses.
    """
    if len(rankings) != len(truths):
        raise LengthMismatch(f"{len(rankings)} rankings vs {len(truths)} truths")
    if n < 1:
        raise ValueError("n must be >= 1")
    hits = sum(1 for ranking, truth in zip(rankings, truths) if truth in ranking[:n])
    return hits / len(truths) if truths else 0.0


def topn_curve(rankings: list[list[str]], truths: list[str], levels=TOP_N_LEVELS) -> dict[int, float]:
    return {n: topn_accuracy(rankings, truths, n) for n in levels}


_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_C1 = (0.01 * 1.0) ** 2
_SSIM_C2 = (0.03 * 1.0) ** 2


def _ssim_kernel() -> np.ndarray:
    half = (_SSIM_WINDOW - 1) // 2
    xs = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-(xs * xs) / (2.0 * _SSIM_SIGMA**2))
    k2 = np.outer(k, k)
    return k2 / k2.sum()


def _windowed(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Valid-mode weighted local sums via a sliding window."""
    from numpy.lib.stride_tricks import sliding_window_view

    windows = sliding_window_view(img, kernel.shape)
    return np.einsum("ijkl,kl->ij", windows, kernel)


def ssim(a: Glyph, b: Glyph) -> float:
    """Mean local SSIM with an 11x11 Gaussian window, sigma 1.5, L = 1."""
    if a.size != b.size:
        raise SizeMismatch(f"{a.size} vs {b.size}")
    x = a.pixels.astype(np.float64)
    y = b.pixels.astype(np.float64)
    k = _ssim_kernel()
    mu_x = _windowed(x, k)
    mu_y = _windowed(y, k)
    xx = _windowed(x * x, k) - mu_x * mu_x
    yy = _windowed(y * y, k) - mu_y * mu_y
    xy = _windowed(x * y, k) - mu_x * mu_y
    num = (2 * mu_x * mu_y + _SSIM_C1) * (2 * xy + _SSIM_C2)
    den = (mu_x * mu_x + mu_y * mu_y + _SSIM_C1) * (xx + yy + _SSIM_C2)
    return float((num / den).mean())


def l1(a: Glyph, b: Glyph) -> float:
    """Mean absolute pixel difference."""
    if a.size != b.size:
        raise SizeMismatch(f"{a.size} vs {b.size}")
    return float(np.abs(a.pixels.astype(np.float64) - b.pixels.astype(np.float64)).mean())


def frechet_diag(a: np.ndarray, b: np.ndarray) -> float:
    """Squared Frechet distance between diagonal-Gaussian fits of two
    embedding sets: |mu_a - mu_b|^2 + sum(va + vb - 2*sqrt(va*vb)).

    Population (ddof=0) variances. Requires at least 2 samples per side.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("inputs must be 2-D (samples x dim)")
    if a.shape[0] < 2 or b.shape[0] < 2:
        raise InsufficientSamples("need at least 2 samples per set")
    if a.shape[1] != b.shape[1]:
        raise SizeMismatch(f"dim {a.shape[1]} vs {b.shape[1]}")
    mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
    va, vb = a.var(axis=0), b.var(axis=0)
    d2 = float(((mu_a - mu_b) ** 2).sum() + (va + vb - 2.0 * np.sqrt(va * vb)).sum())
    return max(d2, 0.0)
