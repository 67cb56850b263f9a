"""Compare the compiled and numpy replication kernels.

    python benchmarks/bench_kernels.py [--reps 100000] [--repeat 3]

For each workload, prints the best-of-``repeat`` wall time per backend,
the speedup, and whether both backends produced identical output.
"""

import argparse
import time

import numpy as np

from quickest_selection import build_tables, size_focused_dp
from quickest_selection.kernels import BACKENDS
from quickest_selection.simulation import OBSERVATION_CAP


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def workloads(reps):
    table = build_tables(200)
    t = np.ascontiguousarray(table.t)
    grid = np.ascontiguousarray(size_focused_dp(100, 10_000).values)
    return [
        ("stream n=20", lambda k: k.stream_times(t, 20, 1, 42, 0, reps, OBSERVATION_CAP)),
        ("stream n=50", lambda k: k.stream_times(t, 50, 1, 42, 0, reps, OBSERVATION_CAP)),
        ("blocking m=2 n=5", lambda k: k.stream_times(t, 5, 2, 42, 0, reps, OBSERVATION_CAP)),
        ("shortcut n=50", lambda k: k.shortcut_times(t, 50, 42, 0, reps)),
        ("shortcut n=200", lambda k: k.shortcut_times(t, 200, 42, 0, reps)),
        ("size-focused h=100", lambda k: k.size_focused_counts(grid, 100, 42, 0, reps)),
    ]


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    names = [b for b in ("compiled", "python") if b in BACKENDS]
    print(f"{args.reps} replications, best of {args.repeat}")
    print(f"{'workload':20}" + "".join(f"{b:>12}" for b in names) + f"{'speedup':>10}{'identical':>11}")
    for label, run in workloads(args.reps):
        results = {b: best_of(lambda: run(BACKENDS[b]), args.repeat) for b in names}
        row = f"{label:20}" + "".join(f"{results[b][0]:11.3f}s" for b in names)
        if len(names) == 2:
            (tc, oc), (tp, op) = results["compiled"], results["python"]
            row += f"{tp / tc:9.1f}x{str(bool(np.array_equal(oc, op))):>11}"
        print(row)


if __name__ == "__main__":
    main()
