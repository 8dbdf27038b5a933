"""Compare the compiled stepper kernel against the pure-Python fallback.

The propagator looks the stepper up through qpencil.kernel.integrate_span
on every call, so rebinding that one attribute switches the entire stack;
each workload below therefore runs identical code apart from the stepper
itself. Invoke from the repository root:

    python benchmarks/bench_kernel.py [--repeat N]

Wall-clock best-of-N, single-threaded unless PENCIL_THREADS says otherwise
(the per-call comparison is the same either way).
"""
import argparse
import time

import numpy as np

from qpencil import kernel, problems
from qpencil.model import PI
from qpencil.spectral import find_eigenvalues, scan_characteristic
from qpencil.weyl import default_offaxis_grid, sample_weyl_grid


def _raw_span(kern):
    pc = np.zeros(1)
    qc = np.asarray([0.7])
    for lam in (5.0, 30.0, 60.0):
        y, yp, status, _ = kern(complex(lam), 4.0, pc, qc, 0.0, 0.0, PI,
                                1.0 + 0j, 0j, 1e-10, 1e-10, PI / 16.0, 0,
                                1e300)
        if status != 0:
            raise RuntimeError(f"span integration failed, status {status}")


def _char_scan(_kern):
    prob = problems.get("jump-gamma-q")
    scan_characteristic(prob, [0.5 + 0.35 * k for k in range(60)])


def _eigenvalues(_kern):
    find_eigenvalues(problems.jump_plain(), 15.0)


def _weyl_grid(_kern):
    prob = problems.get("jump-gamma-q")
    sample_weyl_grid(prob, default_offaxis_grid(12), ())


WORKLOADS = [
    ("raw span, lam in {5, 30, 60}", _raw_span, 20),
    ("characteristic scan, 60 lambdas", _char_scan, 1),
    ("eigenvalues below 15", _eigenvalues, 1),
    ("Weyl grid, 12 off-axis points", _weyl_grid, 1),
]


def _time(fn, kern, inner, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn(kern)
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3,
                        help="best-of-N repetitions per cell (default 3)")
    args = parser.parse_args()

    table = kernel.available_kernels()
    print(f"kernels available: {', '.join(sorted(table))} "
          f"(active: {kernel.ACTIVE_KERNEL})")
    if "compiled" not in table:
        print("compiled extension not built; timing the fallback only")

    names = [n for n in ("python", "compiled") if n in table]
    header = f"{'workload':<34}" + "".join(f"{n + ' (s)':>14}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    saved = kernel.integrate_span
    try:
        for label, fn, inner in WORKLOADS:
            row = f"{label:<34}"
            timings = []
            for name in names:
                kernel.integrate_span = table[name]
                timings.append(_time(fn, table[name], inner, args.repeat))
                row += f"{timings[-1]:>14.4f}"
            if len(timings) == 2:
                row += f"{timings[0] / timings[1]:>9.1f}x"
            print(row)
    finally:
        kernel.integrate_span = saved


if __name__ == "__main__":
    main()
