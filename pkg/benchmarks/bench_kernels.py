"""Benchmark the compiled kernel backend against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat 5]

Times the binary-morphology hot kernels on a batch of synthesized glyph
masks and verifies both backends agree bit for bit while timing them.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from glyphdict import demo
from glyphdict.kernels import backends


def glyph_batch(n: int = 64) -> list[np.ndarray]:
    specs = demo.demo_charspecs(min(n, 200))
    masks = []
    for spec in specs[:n]:
        for render in spec.font_renders[:1]:
            masks.append(render.mask())
    return masks


def bench(fn, masks, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for m in masks:
            fn(m)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--glyphs", type=int, default=64)
    args = parser.parse_args()

    masks = glyph_batch(args.glyphs)
    impls = backends()
    print(f"backends: {', '.join(impls)} | {len(masks)} glyph masks (96x96), best of {args.repeat}\n")

    kernels = {
        "thin": lambda b, m: b.thin(m),
        "erode_cross x3": lambda b, m: b.erode_cross(m, 3),
        "dilate_disc r3": lambda b, m: b.dilate_disc(m, 3),
        "erode_disc r2": lambda b, m: b.erode_disc(m, 2),
        "label_components": lambda b, m: b.label_components(m),
    }

    header = f"{'kernel':<18}" + "".join(f"{name:>14}" for name in impls)
    if len(impls) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for kname, call in kernels.items():
        times = {}
        for bname, backend in impls.items():
            times[bname] = bench(lambda m, b=backend: call(b, m), masks, args.repeat)
        row = f"{kname:<18}" + "".join(f"{times[b] * 1e3:>12.1f}ms" for b in impls)
        if len(impls) > 1:
            base = times.get("pure")
            fast = min(t for b, t in times.items() if b != "pure")
            row += f"{base / fast:>9.1f}x"
        print(row)

    if len(impls) > 1:
        names = list(impls)
        for m in masks[:16]:
            outs = [impls[n].thin(m).tobytes() for n in names]
            assert all(o == outs[0] for o in outs), "backend outputs diverge"
        print("\nparity: all backends bit-identical on the sample")


if __name__ == "__main__":
    main()
