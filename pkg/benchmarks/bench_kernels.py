"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 14] [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from eamkit import _kernels_py

try:
    from eamkit import _ckernels
except ImportError:
    _ckernels = None


def cases(n):
    rng = np.random.default_rng(0)
    s = rng.random(1 << n)
    w = rng.random((n, n))
    w = w + w.T
    np.fill_diagonal(w, 0)
    bonds = np.arange(n)
    mask = (1 << (n // 2)) - 1
    return {
        "cut_sums": lambda k: k.cut_sums(s, n),
        "predict_all": lambda k: k.predict_all(w, n),
        "schmidt_indices": lambda k: k.schmidt_indices(mask, n),
        "fermion_signs": lambda k: k.fermion_signs(0b0101010101 & ((1 << n) - 1), n),
        "xxz_sector": lambda k: k.xxz_sector(n, bonds, (bonds + 1) % n, np.ones(n), 1.0),
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=14)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = [("python", _kernels_py)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"N={args.n}, best of {args.repeat}")
    print(f"{'kernel':<16}" + "".join(f"{name:>12}" for name, _ in backends) + ("     speedup" if _ckernels else ""))
    for kernel, fn in cases(args.n).items():
        times = [min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) for _, mod in backends]
        row = f"{kernel:<16}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>11.1f}x"
        print(row)
    if _ckernels is None:
        print("compiled extension not built; only the fallback was timed")
    pipeline(backends, args.n, args.repeat)


def pipeline(backends, n, repeat):
    """Free-fermion sweep + fit + error with each backend swapped in."""
    from eamkit import eamfit, entropy, kernels, states

    ffg = states.freefermion_ground(states.dimerized_hopping(n, 0.5))
    table = entropy.all_entropies(ffg)
    print(f"\nfit_eam on a free-fermion table, N={n}")
    for name, mod in backends:
        for attr in ("cut_sums", "predict_all"):
            setattr(kernels, attr, getattr(mod, attr))
        best = min(timeit.repeat(lambda: eamfit.fit_eam(table), number=1, repeat=repeat))
        print(f"{name:<16}{best * 1e3:>10.2f}ms")


if __name__ == "__main__":
    main()
