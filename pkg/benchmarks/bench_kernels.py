"""Compare the compiled and numpy kernel backends on a synthetic year slice.

    python3 benchmarks/bench_kernels.py --n 100000 --repeat 3
"""
import argparse
import time

import numpy as np

from interdiv import kernels, metrics
from interdiv.corpus import Corpus
from interdiv.taxonomy import N_FIELDS, N_SDGS


def synthetic(n, seed):
    rng = np.random.default_rng(seed)
    fields = rng.random((n, N_FIELDS)) * (rng.random((n, N_FIELDS)) < 0.15)
    fields[np.arange(n), rng.integers(0, N_FIELDS, n)] = rng.uniform(0.05, 1.0, n)
    sdgs = rng.random((n, N_SDGS)) * (rng.random((n, N_SDGS)) < 0.2)
    return Corpus([f"W{i}" for i in range(n)], np.full(n, 2000), rng.integers(0, 500, n), fields, sdgs)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000, help="publications in the slice")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    corpus = synthetic(args.n, args.seed)
    positive = corpus.field_scores > 0
    steps = {
        "distance matrix": lambda: metrics.build_distance_matrix(corpus),
        "publication deltas": lambda: metrics.publication_deltas(corpus.field_scores, dm),
        "sdg mass": lambda: metrics.accumulate_sdg_mass(corpus),
        "cooccurrence": lambda: kernels.backend().cooccurrence(positive),
    }
    dm = metrics.build_distance_matrix(corpus)
    results = {}
    for name in kernels.available():
        with kernels.use(name):
            results[name] = {step: best_of(fn, args.repeat) for step, fn in steps.items()}
            results[name]["deltas"] = metrics.publication_deltas(corpus.field_scores, dm)[0]

    names = kernels.available()
    print(f"n={args.n} publications, {N_FIELDS} fields, best of {args.repeat}")
    print(f"{'step':<20}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for step in steps:
        row = f"{step:<20}" + "".join(f"{results[n][step] * 1e3:>10.1f}ms" for n in names)
        if "cython" in results and "python" in results:
            row += f"{results['python'][step] / results['cython'][step]:>11.1f}x"
        print(row)
    if len(names) > 1:
        a, b = (results[n]["deltas"] for n in names)
        same = np.array_equal(a, b, equal_nan=True)
        print(f"publication deltas bit-identical across backends: {same}")


if __name__ == "__main__":
    main()
