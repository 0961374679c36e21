"""Compiled vs pure-Python kernels on a realistic denoised map.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times connected-component labeling and boundary tracing of the default
scene's mask with each available backend, then one full scene with the
backend chosen at import.
"""

import argparse
import timeit

import numpy as np

from crabdetect import _kernels
from crabdetect.config import RunConfig
from crabdetect.pipeline import run_scene
from crabdetect.regions import label_regions


def best_ms(fn, repeat):
    return 1e3 * min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    res = run_scene(RunConfig())
    mask = np.ascontiguousarray(res.denoised.values != 0, dtype=np.uint8)
    crops = []
    for reg in label_regions(mask):
        m, (dr, dc) = reg.mask(pad=1)
        crops.append((m, int(reg.pixels[0, 0] - dr), int(reg.pixels[0, 1] - dc)))
    print(f"map {mask.shape[0]}x{mask.shape[1]}, {int(mask.sum())} support pixels, "
          f"{len(crops)} regions")

    timings = {}
    for name, impl in sorted(_kernels.BACKENDS.items()):
        label = best_ms(lambda: impl.label_components(mask), args.repeat)
        trace = best_ms(lambda: [impl.trace_boundary(*c) for c in crops], args.repeat)
        timings[name] = (label, trace)
        print(f"{name:>7}: label {label:8.3f} ms   trace {trace:8.3f} ms")
    if "cython" in timings:
        (pl, pt), (cl, ct) = timings["python"], timings["cython"]
        print(f"speed-up: label x{pl / cl:.1f}, trace x{pt / ct:.1f}")

    scene = best_ms(lambda: run_scene(RunConfig()), max(3, args.repeat // 4))
    print(f"full scene with '{_kernels.BACKEND}' backend: {scene:.1f} ms")


if __name__ == "__main__":
    main()
