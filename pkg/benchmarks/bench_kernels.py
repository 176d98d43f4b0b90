"""Time the compiled and pure-Python search kernels on random instances.

    python benchmarks/bench_kernels.py --sizes 16 20 24 --repeat 3
"""

from __future__ import annotations

import argparse
import random
import time

from plopt import _kernels


def instance(rng: random.Random, n: int, density: float):
    adj = [0] * n
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < density:
                adj[a] |= 1 << b
                adj[b] |= 1 << a
    gains = [rng.randint(-50, 500) for _ in range(n)]
    costs = [rng.randint(10, 600) for _ in range(n)]
    return adj, gains, costs


def cases(adj, gains, costs):
    budget = sum(costs) // 3
    return {
        "count": lambda k: k.count_independent(adj),
        "enumerate": lambda k: k.enumerate_independent(adj, gains, costs),
        "budget": lambda k: k.budget_search(adj, gains, costs, budget, -1),
        "ratio": lambda k: k.ratio_search(adj, gains, costs, 10, 10, 0.0, 1.6, 1e-9, -1),
    }


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[12, 16, 20])
    ap.add_argument("--density", type=float, default=0.1, help="conflict edge probability")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    backends = _kernels.available()
    names = [k.NAME for k in backends]
    print(f"backends: {', '.join(names)} (default: {_kernels.BACKEND})")
    if len(backends) < 2:
        print("compiled kernels not built; only the fallback is timed")
    header = f"{'n':>4}  {'kernel':<10}" + "".join(f"{n + ' s':>12}" for n in names)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)

    rng = random.Random(args.seed)
    for n in args.sizes:
        adj, gains, costs = instance(rng, n, args.density)
        for label, fn in cases(adj, gains, costs).items():
            results = [fn(k) for k in backends]
            if label == "ratio":  # objective floats may differ in the last bit; compare subsets
                results = [[c[0] for c in r] for r in results]
            if any(r != results[0] for r in results[1:]):
                raise SystemExit(f"backends disagree on {label} for n={n}")
            times = [best_of(lambda k=k: fn(k), args.repeat) for k in backends]
            row = f"{n:>4}  {label:<10}" + "".join(f"{t:>12.5f}" for t in times)
            if len(times) == 2:
                row += f"{times[1] / max(times[0], 1e-9):>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
