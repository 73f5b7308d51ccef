"""Compare the compiled and pure-Python agent kernels.

    python3 benchmarks/bench_kernels.py --n 10000 --horizon 100 --repeat 3
"""

import argparse
import time

import numpy as np

from fwadopt import kernels
from fwadopt.dynamics import simulate_agents
from fwadopt.equilibrium import UNSEEDED, analyze
from fwadopt.model import ModelParams


def reference() -> ModelParams:
    return ModelParams.from_flat(
        mu=1.0, lam=0.5, gamma=1.0, r=0.5, c0=0.1, c=0.4, c1i=1.0, c2i=1.0, pi0=0.3, Pi0=1.0, Pi1=0.4, alpha=0.0
    )


def best_time(params, report, args, backend):
    times, last = [], None
    for _ in range(args.repeat):
        start = time.perf_counter()
        traj, _ = simulate_agents(params, args.n, UNSEEDED, args.horizon, args.seed, report=report, backend=backend)
        times.append(time.perf_counter() - start)
        last = traj
    return min(times), last


def kernel_only(params, args, backend):
    """Time one pass of the inner loop over pre-drawn clocks, RNG excluded."""
    from fwadopt.dynamics import decision_tables

    n = args.n
    rng = np.random.default_rng(args.seed)
    m = int(n * args.horizon * params.gamma)
    dt = rng.exponential(1.0 / (n * params.gamma), m)
    idx = rng.integers(0, n, m, dtype=np.int64)
    buy, pref = decision_tables(params, n)
    kern = kernels.get(backend)
    best = np.inf
    for _ in range(args.repeat):
        states = np.zeros(n, np.int8)
        counts = np.array([n, 0, 0], dtype=np.int64)
        out = (np.empty(m), np.empty(m, np.int64), np.empty(m, np.int64))
        start = time.perf_counter()
        kern.agent_events(states, counts, 0.0, np.inf, dt, idx, buy, pref, *out)
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=10_000)
    parser.add_argument("--horizon", type=float, default=100.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    params = reference()
    report = analyze(params)
    events = int(args.n * args.horizon * params.gamma)
    print(f"agent kernel, n={args.n}, horizon={args.horizon} (~{events:,} revision events)")
    results = {}
    for backend in kernels.available():
        elapsed, traj = best_time(params, report, args, backend)
        results[backend] = (elapsed, traj)
        print(f"  {backend:9s} {elapsed:8.4f} s  {events / elapsed / 1e6:7.2f} M events/s")
    if len(results) == 2:
        (tc, a), (tp, b) = results["compiled"], results["python"]
        same = np.array_equal(a.t, b.t) and np.array_equal(a.x, b.x)
        print(f"  speedup   {tp / tc:8.1f}x  identical paths: {same}")
        kc, kp = kernel_only(params, args, "compiled"), kernel_only(params, args, "python")
        print(f"inner loop only (clocks pre-drawn): compiled {kc:.4f} s, python {kp:.4f} s, speedup {kp / kc:.1f}x")


if __name__ == "__main__":
    main()
