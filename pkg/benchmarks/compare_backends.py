"""Compare the compiled and pure-Python stepping kernels.

Runs the standard grid (SI and SIR, Euler/RK4/P-C, h in 0.25, 0.10, 0.01) on
every available backend, checks that both backends end in the same final
state, and prints median times and the speed-up.

    python benchmarks/compare_backends.py [--measured-runs 11] [--csv out.csv]
"""

import argparse
import sys

from epibench import bench, kernels
from epibench.integrators import METHODS
from epibench.models import DEFAULT_STEPS
from epibench.report import rows_to_csv


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--warmup-runs", type=int, default=3)
    parser.add_argument("--measured-runs", type=int, default=11)
    parser.add_argument("--csv", help="also write the comparison as CSV")
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled kernels not built; only the Python backend is available", file=sys.stderr)

    results = {}
    for backend in backends:
        for rec in bench.run_benchmark_suite(
            METHODS, ["si", "sir"], DEFAULT_STEPS, args.warmup_runs, args.measured_runs, backend
        ):
            if isinstance(rec, bench.BenchFailure):
                print(f"{backend}: {rec.config} failed: {rec.error}", file=sys.stderr)
                return 2
            results[(backend, rec.model, rec.method, rec.h)] = rec

    rows = []
    header = f"{'model':<5} {'method':<6} {'h':>5} " + " ".join(f"{b + ' [s]':>14}" for b in backends)
    if len(backends) > 1:
        header += f" {'speed-up':>9}"
    print(header)
    for model in ("si", "sir"):
        for method in METHODS:
            for h in DEFAULT_STEPS:
                recs = [results[(b, model, method, h)] for b in backends]
                if len({r.final_state for r in recs}) != 1:
                    print(f"final states differ between backends for {model}/{method}/h={h}", file=sys.stderr)
                    return 2
                row = {"model": model, "method": method, "h": h}
                row.update({f"{b}_median_s": r.median for b, r in zip(backends, recs)})
                line = f"{model:<5} {method:<6} {h:>5g} " + " ".join(f"{r.median:>14.9f}" for r in recs)
                if len(backends) > 1:
                    speedup = row["python_median_s"] / row["compiled_median_s"]
                    row["speedup"] = speedup
                    line += f" {speedup:>8.1f}x"
                rows.append(row)
                print(line)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(rows_to_csv(rows, list(rows[0])))
    return 0


if __name__ == "__main__":
    sys.exit(main())
