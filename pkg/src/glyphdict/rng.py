"""Deterministic seeded randomness used across the pipeline.

All randomness flows through splitmix64 so that results are reproducible
bit-for-bit from a single 64-bit seed, independent of worker count or
scheduling order. Derived seeds are computed with :func:`hash64` over the
identifying fields of each work item, never by drawing from a shared stream.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def mix64(x: int) -> int:
    """splitmix64 finalizer: a bijective 64-bit mix."""
    x &= _MASK
    x = (x ^ (x >> 30)) * 0xBF58476D1FD4E9E5 & _MASK
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & _MASK
    return x ^ (x >> 31)


def hash64(*parts: int | str | bytes) -> int:
    """Stable 64-bit hash of a heterogeneous tuple.

    Each part is folded with a type tag so ("a", 1) and ("a1",) differ.
    Result is further mixed so low-entropy inputs still spread over 64 bits.
    """
    h = _FNV_OFFSET
    for part in parts:
        if isinstance(part, int):
            tag, data = 0x49, (part & _MASK).to_bytes(8, "little")
        elif isinstance(part, str):
            tag, data = 0x53, part.encode("utf-8")
        elif isinstance(part, bytes):
            tag, data = 0x42, part
        else:
            raise TypeError(f"unhashable part type: {type(part)!r}")
        h = (h ^ tag) * _FNV_PRIME & _MASK
        h = (h ^ len(data)) * _FNV_PRIME & _MASK
        for b in data:
            h = (h ^ b) * _FNV_PRIME & _MASK
    return mix64(h)


class Rng:
    """Sequential splitmix64 generator.

    Cheap to construct per work item; not shared across items (derive a
    fresh seed with hash64 instead).
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return mix64(self._state)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n). Modulo reduction; bias is < 2**-50
        for any n this codebase uses (n << 2**64)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.u64() % n

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * ((self.u64() >> 11) * 2.0**-53)

    def choice(self, seq):
        return seq[self.below(len(seq))]

    def gauss(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        # Box-Muller, no cached spare: state advances exactly two steps.
        u1 = ((self.u64() >> 11) + 1) * 2.0**-53
        u2 = (self.u64() >> 11) * 2.0**-53
        return mu + sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def shuffle(self, items: list) -> None:
        """Fisher-Yates, in place."""
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]


def uniform_field(seed: int, n: int) -> np.ndarray:
    """n uniforms in [0,1) as float64, vectorized splitmix64.

    Element i equals the i-th output of Rng(seed).uniform(), so scalar and
    vector paths are interchangeable.
    """
    state = (np.uint64(seed) + np.uint64(_GOLDEN) * (np.arange(1, n + 1, dtype=np.uint64)))
    with np.errstate(over="ignore"):
        z = state
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1FD4E9E5)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def gauss_field(seed: int, n: int) -> np.ndarray:
    """n standard normals, Box-Muller over uniform_field pairs."""
    u = uniform_field(seed, 2 * n)
    u1 = u[0::2] + 2.0**-53
    u2 = u[1::2]
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
