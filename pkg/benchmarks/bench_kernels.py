"""Compare the compiled and pure-Python Dormand-Prince kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each workload is integrated with both kernels; the script reports the best
wall time per kernel, the speed-up and the largest state difference between
the two trajectories (they run the same arithmetic, so it should be 0).
"""
import argparse
import time

import numpy as np

from hyperlie import _backend, flow, poisson

WORKLOADS = {
    "S_0 to t=-10": (np.eye(3), flow.FlowConfig(0.0, -10.0), {}),
    "S_O r=1 classify": (np.diag([np.sqrt(2.0), 1.0, 1.0]), flow.FlowConfig(0.0, -1e6),
                         {"eps_crit": 1e-8, "f_max": 3e6}),
    "S_0 classify": (np.eye(3), flow.FlowConfig(0.0, -1e6), {"eps_crit": 1e-8, "f_max": 3e6}),
    "generic to blow-up": (poisson.point((1.0, 0.3, -0.2), (0.1, 0.9, 0.4), (-0.3, 0.2, 1.1)),
                           flow.FlowConfig(0.0, -20.0), {"f_max": 1e6}),
}


def best_time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    names = _backend.available()
    if "cython" not in names:
        print("compiled kernel not built; only the Python kernel is available")
    print(f"{'workload':<22}{'steps':>8}" + "".join(f"{n + ' [ms]':>16}" for n in names)
          + f"{'speed-up':>10}{'max diff':>11}")
    for label, (p0, cfg, kw) in WORKLOADS.items():
        times, trajs = {}, {}
        for name in names:
            times[name], trajs[name] = best_time(
                lambda: flow.integrate(p0, cfg, backend=name, **kw), args.repeat)
        ref = trajs[names[-1]]
        diff = max(float(np.max(np.abs(t.states - ref.states))) if len(t) == len(ref) else float("nan")
                   for t in trajs.values())
        speed = times["python"] / times["cython"] if "cython" in times else 1.0
        print(f"{label:<22}{ref.n_accepted:>8}"
              + "".join(f"{1e3 * times[n]:>16.2f}" for n in names)
              + f"{speed:>9.1f}x{diff:>11.1e}")


if __name__ == "__main__":
    main()
