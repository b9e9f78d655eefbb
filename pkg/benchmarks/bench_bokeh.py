#!/usr/bin/env python3
"""Benchmark the disc-gather blur kernel: compiled extension vs NumPy fallback.

Usage:
    python benchmarks/bench_bokeh.py [--sizes 128,256,512] [--blurs 5,15,30] [--repeats 3]

The scene is a textured two-plane layout (sharp foreground disk over a
defocused background), which exercises both the copy path and the full
gather path of the kernel.
"""

import argparse
import time

import numpy as np
from scipy import ndimage

from camsim._kernels import available_backends


def make_scene(size: int, seed: int = 0):
    rng = np.random.default_rng(seed)
    img = np.zeros((size, size))
    for sigma, amp in [(1, 0.5), (4, 1.0), (16, 2.0)]:
        img += amp * ndimage.gaussian_filter(rng.standard_normal((size, size)), sigma)
    img -= img.min()
    img /= img.max()
    rgb = np.ascontiguousarray(np.repeat(img[:, :, None], 3, axis=2))
    yy, xx = np.mgrid[:size, :size]
    disk = (yy - size / 2) ** 2 + (xx - size / 2) ** 2 <= (size / 5) ** 2
    defocus = np.where(disk, 0.0, 1.0)   # focus on the disk
    return rgb, defocus


def bench(fn, img, defocus, blur, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn(img, defocus, blur, blur, 0.2, 0.05)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="128,256,512")
    parser.add_argument("--blurs", default="5,15,30")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'size':>6} {'blur':>5} " +
          " ".join(f"{name:>12}" for name in backends) + f" {'speedup':>9}")
    for size in (int(s) for s in args.sizes.split(",")):
        img, defocus = make_scene(size)
        for blur in (float(b) for b in args.blurs.split(",")):
            times = {}
            outputs = {}
            for name, fn in backends.items():
                times[name], outputs[name] = bench(fn, img, defocus, blur, args.repeats)
            row = f"{size:>6} {blur:>5.0f} " + \
                  " ".join(f"{times[name] * 1e3:>10.1f}ms" for name in backends)
            if len(times) == 2:
                numpy_t, cython_t = times["numpy"], times["cython"]
                row += f" {numpy_t / cython_t:>8.1f}x"
                assert np.allclose(outputs["numpy"], outputs["cython"],
                                   rtol=1e-12, atol=1e-13), "backends disagree"
            print(row)


if __name__ == "__main__":
    main()
