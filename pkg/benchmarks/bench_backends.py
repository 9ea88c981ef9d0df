"""Compare the compiled kernels against the pure-numpy fallback.

Runs itself twice as a subprocess (QTC_NUMBA=1 and QTC_NUMBA=0) so each
backend is selected at import time, then prints a side-by-side table.

    python3 benchmarks/bench_backends.py [--trials 50] [--sizes 16,32,64]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def run_child(trials, sizes):
    import numpy as np

    from qtc import _kernels
    from qtc.enhance import enhanced_hdrg_decode
    from qtc.hdrg import hdrg_decode
    from qtc.lattice import CodeParams, NoiseParams, compute_syndrome, make_rng, sample_errors
    from qtc.percolation import spans

    _kernels.warmup()
    results = {"backend": "numba" if _kernels.USING_NUMBA else "numpy"}
    for L in sizes:
        params = CodeParams(L, 5)
        noise = NoiseParams(0.1)
        syndromes = [
            compute_syndrome(sample_errors(params, noise, make_rng(1, i)))
            for i in range(trials)
        ]
        for name, fn in [
            ("hdrg", lambda W: hdrg_decode(W)),
            ("enhanced", lambda W: enhanced_hdrg_decode(W)),
            ("spans", lambda W: spans(W)),
        ]:
            t0 = time.perf_counter()
            for W in syndromes:
                fn(W)
            dt = (time.perf_counter() - t0) / trials
            results[f"{name}_L{L}"] = dt
    print(json.dumps(results))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--sizes", type=str, default="16,32,64")
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if args.child:
        run_child(args.trials, sizes)
        return

    rows = {}
    for flag in ("1", "0"):
        env = dict(os.environ, QTC_NUMBA=flag)
        cmd = [sys.executable, os.path.abspath(__file__), "--child",
               "--trials", str(args.trials), "--sizes", args.sizes]
        out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
        rows[flag] = json.loads(out.stdout.strip().splitlines()[-1])

    fast, slow = rows["1"], rows["0"]
    print(f"{'case':>16}  {'numba':>10}  {'numpy':>10}  {'speedup':>8}")
    for key in sorted(k for k in fast if k != "backend"):
        a, b = fast[key], slow[key]
        print(f"{key:>16}  {a * 1e3:9.3f}ms  {b * 1e3:9.3f}ms  {b / a:7.1f}x")


if __name__ == "__main__":
    main()
