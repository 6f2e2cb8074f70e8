"""Benchmark the accelerated kernels against the pure-NumPy fallback.

Runs each hot kernel under both backends by re-importing qsgames in a
subprocess with QSGAMES_NO_NUMBA toggled, then prints a comparison
table.  The interesting workload is the generator state recovery that
the ORAM separation experiment performs once per trial.

    python benchmarks/bench_kernels.py [--trials 20]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json
import time

from qsgames import _accel
from qsgames.rng import BlumMicaliPrng

P, G = 65537, 3
N_TAG, N_TREE, N_DB, K = 5, 4, 16, 16

def observed_leaves(seed):
    prng = BlumMicaliPrng(P, G, seed)
    outs = [prng.next_value(N_TAG).value & ((1 << N_TREE) - 1) for out in range(N_DB + K)]
    positions = [0] + [N_DB + t - 1 for t in range(1, K)]
    return positions, [outs[p] for p in positions], outs[N_DB + K - 1]

def bench(trials):
    _accel.warmup()
    timings = {}

    t0 = time.perf_counter()
    for i in range(trials):
        positions, expected, truth = observed_leaves(1000 + i)
        seed, prediction = _accel.bm_recover_state(P, G, N_TAG, N_TREE, positions, expected,
                                                   N_DB + K - 1)
        assert prediction == truth
    timings["state-recovery"] = (time.perf_counter() - t0) / trials

    t0 = time.perf_counter()
    for i in range(trials):
        _accel.dlog_bruteforce_raw(65537, 3, pow(3, 60000 + i, 65537))
    timings["dlog-bruteforce"] = (time.perf_counter() - t0) / trials

    t0 = time.perf_counter()
    for i in range(trials):
        _accel.bm_stream_bits(65537, 3, 1 + i, 2000)
    timings["stream-2000-bits"] = (time.perf_counter() - t0) / trials

    print(json.dumps({"backend": _accel.BACKEND, "timings": timings}))

import sys
bench(int(sys.argv[1]))
"""


def run_backend(no_numba: bool, trials: int) -> dict:
    env = dict(os.environ)
    env["QSGAMES_NO_NUMBA"] = "1" if no_numba else "0"
    out = subprocess.run(
        [sys.executable, "-c", WORKER, str(trials)],
        capture_output=True, text=True, env=env, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=20)
    args = parser.parse_args()

    fast = run_backend(no_numba=False, trials=args.trials)
    slow = run_backend(no_numba=True, trials=args.trials)
    print(f"{'kernel':24s} {fast['backend']:>12s} {slow['backend']:>12s} {'speedup':>9s}")
    for name in fast["timings"]:
        a = fast["timings"][name]
        b = slow["timings"][name]
        print(f"{name:24s} {a * 1e3:10.2f}ms {b * 1e3:10.2f}ms {b / a:8.1f}x")


if __name__ == "__main__":
    main()
