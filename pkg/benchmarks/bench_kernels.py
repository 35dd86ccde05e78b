"""Compare the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from bcihome import dsp, kernels


def cases(rng):
    spec = dsp.design_bandpass(4, 1.0, 10.0, 512)
    b = np.asarray(spec.b)
    a = np.asarray(spec.a)
    x2 = rng.standard_normal(1024)
    x4 = rng.standard_normal(2048)
    x6 = rng.standard_normal(3072)
    rect = np.abs(x6)
    return {
        "autocorr 2 s (1024)": lambda m: m.autocorr_biased(x2),
        "autocorr 4 s (2048)": lambda m: m.autocorr_biased(x4),
        "lfilter 6 s (3072)": lambda m: m.lfilter(b, a, x6),
        "above_runs 6 s (3072)": lambda m: m.above_runs(rect, 1.0),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--trials", type=int, default=200)
    args = ap.parse_args()
    if kernels.compiled is None:
        raise SystemExit("compiled extension not built; run `pip install --no-build-isolation -e .`")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<24}{'fallback ms':>13}{'compiled ms':>13}{'speedup':>9}")
    for name, fn in cases(rng).items():
        times = {}
        for label, mod in (("fallback", kernels.fallback), ("compiled", kernels.compiled)):
            number = 20 if label == "fallback" else 200
            best = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat))
            times[label] = best / number * 1e3
        print(f"{name:<24}{times['fallback']:>13.4f}{times['compiled']:>13.4f}"
              f"{times['fallback'] / times['compiled']:>8.1f}x")

    print()
    print(f"end-to-end: {args.trials} simulated trials")
    code = ("import time; from bcihome import BACKEND; from bcihome.config import SessionConfig; "
            "from bcihome.session import run_session; t=time.perf_counter(); "
            f"run_session(SessionConfig(), {args.trials}, 0); "
            "print(BACKEND, round(time.perf_counter()-t, 2))")
    for pure in ("0", "1"):
        env = dict(os.environ, BCIHOME_PURE_PYTHON=pure)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        print(f"  {out[0]:<10}{out[1]:>8} s")


if __name__ == "__main__":
    main()
