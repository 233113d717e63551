#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-Python backend.

Runs the same seeded cells on both backends, checks the results agree
bit for bit, and reports throughput (evaluations/second) plus speedup.

    python scripts/bench_backends.py [--fe 20000] [--seed 11]
"""

import argparse
import time

from crolab import available_backends, get_function
from crolab.backends import run_cell
from crolab.distributions import PerturbationSpec
from crolab.engine import default_parameters

CELLS = [
    ("f1", "gaussian"),
    ("f6", "cauchy"),
    ("f8", "cauchy"),
    ("f9", "exponential"),
    ("f11", "rayleigh"),
    ("f15", "gaussian"),
    ("f20", "gaussian"),
]


def time_cell(fid, kind, seed, fe_limit, backend):
    fn = get_function(fid)
    params = default_parameters(fn)
    spec = PerturbationSpec(kind, params.step_size)
    started = time.perf_counter()
    result = run_cell(fn, params, spec, seed, fe_limit, backend=backend)
    elapsed = time.perf_counter() - started
    return result, elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--fe", type=int, default=20_000,
                        help="evaluation budget per cell (default 20000)")
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    if "c" not in available_backends():
        print("compiled kernel not built; nothing to compare "
              "(pip install -e . builds it)")
        return 1

    print(f"{'cell':>16} {'python':>12} {'compiled':>12} {'speedup':>8}   agree")
    total_py = total_c = 0.0
    for fid, kind in CELLS:
        r_c, t_c = time_cell(fid, kind, args.seed, args.fe, "c")
        r_py, t_py = time_cell(fid, kind, args.seed, args.fe, "python")
        agree = (r_c.best_value == r_py.best_value
                 and r_c.best_struct == r_py.best_struct
                 and r_c.fe_used == r_py.fe_used)
        total_py += t_py
        total_c += t_c
        print(f"{fid + '/' + kind:>16} {args.fe / t_py:>10.0f}/s {args.fe / t_c:>10.0f}/s "
              f"{t_py / t_c:>7.1f}x   {'yes' if agree else 'NO'}")
        if not agree:
            print(f"  best python={r_py.best_value!r} compiled={r_c.best_value!r}")
            return 1
    print(f"{'total':>16} {len(CELLS) * args.fe / total_py:>10.0f}/s "
          f"{len(CELLS) * args.fe / total_c:>10.0f}/s {total_py / total_c:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
