"""Compare the compiled and pure-Python Gauss-Legendre kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--solve]

Times a stored-trajectory integration and the trajectory-free terminal map
used by shooting, for n = 2, 3, 4, and optionally a full qubit solve.
"""

import argparse
import timeit

import numpy as np

from qspline import dynamics
from qspline.dynamics import PhaseState, integrate, terminal_yv
from qspline.lie_basis import build_basis
from qspline.scenarios import load_scenario
from qspline.solver import solve_spline


def _instance(n, seed=0):
    rng = np.random.default_rng(seed)
    b = build_basis(n)
    m = b.dim
    x = np.zeros(m)
    x[b.identity_index] = 1.0 / np.sqrt(2 * n)
    y, v, k = (0.5 * rng.normal(size=m) for _ in range(3))
    return b, PhaseState(0.0, x, y, v), k


def _best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--steps", type=int, default=400)
    p.add_argument("--solve", action="store_true", help="also time the qubit scenario")
    args = p.parse_args(argv)

    backends = dynamics.available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; only the python backend is timed")
    previous = dynamics.get_backend()
    cases = []
    for n in (2, 3, 4):
        b, s0, k = _instance(n)
        cases.append((f"integrate n={n}",
                      lambda b=b, s0=s0, k=k: integrate(s0, k, 0.2, args.steps, b)))
        cases.append((f"terminal_yv n={n}",
                      lambda b=b, s0=s0, k=k: terminal_yv(s0.y, s0.v, k, 0.2, args.steps, b)))
    if args.solve:
        spec = load_scenario("qubit")
        cases.append(("qubit scenario", lambda: solve_spline(spec)))

    print(f"{'case':<20}" + "".join(f"{name:>12}" for name in backends) + f"{'speedup':>10}")
    try:
        for label, fn in cases:
            times = {}
            for name in backends:
                dynamics.set_backend(name)
                fn()  # warm up
                times[name] = _best(fn, args.repeat)
            row = f"{label:<20}" + "".join(f"{times[name] * 1e3:>10.2f}ms" for name in backends)
            if len(times) == 2:
                row += f"{times['python'] / times['compiled']:>9.1f}x"
            print(row)
    finally:
        dynamics.set_backend(previous)


if __name__ == "__main__":
    main()
