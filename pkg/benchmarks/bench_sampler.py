"""Compare the compiled and numpy sampling backends.

Usage::

    python3 benchmarks/bench_sampler.py --samples 100000 --repeats 3
"""
import argparse
import timeit

import numpy as np

from stochheat import _kernels_py
from stochheat.sampler import sample_coupled_batch
from stochheat.spectral import HeatModel

try:
    from stochheat import _kernels
except ImportError:
    _kernels = None

CELLS = [(4, 8, 8), (16, 16, 32), (64, 4, 4)]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    backends = [("python", _kernels_py)]
    if _kernels is None:
        print("compiled extension not built; timing the numpy backend only")
    else:
        backends.append(("cython", _kernels))

    model = HeatModel()
    print(f"{'M':>4} {'N':>4} {'K':>4} {'backend':>8} {'best s':>9} {'samples/s':>12}")
    for M, N, K in CELLS:
        outputs = []
        for name, backend in backends:
            def run():
                return sample_coupled_batch(model, M, N, K, 42, 0, args.samples, backend=backend)

            best = min(timeit.repeat(run, number=1, repeat=args.repeats))
            outputs.append(run())
            print(f"{M:>4} {N:>4} {K:>4} {name:>8} {best:>9.3f} {args.samples / best:>12.0f}")
        if len(outputs) == 2:
            assert np.array_equal(*outputs), "backends disagree"


if __name__ == "__main__":
    main()
