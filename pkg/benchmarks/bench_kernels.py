"""Compare the compiled and pure-Python profile kernels.

    python benchmarks/bench_kernels.py [--repeat 3]

Times evaluate_profiles and deviation_table on random games of growing size,
and one exhaustive oracle family with each backend forced in turn.
"""

import argparse
import time

import numpy as np

from poalp import kernels
from poalp.core import preset_mechanism, preset_welfare
from poalp.oracle import FamilySpec, brute_force_poa


def random_arrays(rng, n, m, k):
    values = rng.choice([0.0, 0.5, 1.0, 2.0], size=m)
    masks = rng.integers(0, 2, size=(n, k, m)).astype(np.uint8)
    n_actions = np.full(n, k, dtype=np.intp)
    w = preset_welfare("covering", n)
    f = preset_mechanism("gairing", n)
    return values, masks, n_actions, w.padded(), f.padded()


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    found = kernels.backends()
    print(f"backends: {', '.join(found)} (active: {kernels.BACKEND})")
    if "cython" not in found:
        print("compiled extension not built; only the Python timings are shown")

    rng = np.random.default_rng(0)
    print(f"\n{'kernel':<18}{'profiles':>10}" + "".join(f"{b:>12}" for b in found) + f"{'speedup':>10}")
    for n, m, k in ((3, 6, 3), (4, 8, 3), (6, 8, 3), (8, 10, 3)):
        arr = random_arrays(rng, n, m, k)
        P = k**n
        for name, call in (
            ("evaluate", lambda mod: mod.evaluate_profiles(*arr, 1e-9)),
            ("deviation", lambda mod: mod.deviation_table(*arr)),
        ):
            t = {b: best_of(lambda: call(mod), args.repeat) for b, mod in found.items()}
            speed = t["python"] / t["cython"] if "cython" in t else float("nan")
            print(f"{name:<18}{P:>10}" + "".join(f"{t[b]:>11.4f}s" for b in found) + f"{speed:>9.1f}x")

    w = preset_welfare("covering", 3)
    f = preset_mechanism("es", 3, w)
    spec = FamilySpec(3, 3, 2, (0.0, 1.0, 3.0))
    print("\noracle family (es, covering, n=3, 3 resources, grid {0,1,3})")
    original = kernels._active
    try:
        for b, mod in found.items():
            kernels._active = mod
            t = time.perf_counter()
            res = brute_force_poa(f, w, spec)
            dt = time.perf_counter() - t
            print(f"  {b:<8} {dt:8.2f}s  games={res.games_checked}  min_ratio={res.min_ratio:.6f}")
    finally:
        kernels._active = original


if __name__ == "__main__":
    main()
