"""Compiled vs pure-Python kernels: gate-level QFT and alias sampling.

    python benchmarks/bench_kernels.py [--qubits 10 14 18] [--shots 1e6 1e7]

Both backends must produce identical results; the script checks that before
reporting timings.
"""
import argparse
import time

import numpy as np

from qftarray import kernels
from qftarray.qsim import QuantumState, apply_qft, sample_shots


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_qft(n_qubits, repeat, backends):
    rng = np.random.default_rng(n_qubits)
    a = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    state = QuantumState(a / np.linalg.norm(a))
    results = {}
    for name in backends:
        results[name] = _best(lambda: apply_qft(state, backend=name), repeat)
    return results


def bench_sampling(shots, repeat, backends):
    rng = np.random.default_rng(0)
    p = rng.random(1024)
    p /= p.sum()
    results = {}
    for name in backends:
        results[name] = _best(lambda: sample_shots(p, shots, seed=1, backend=name), repeat)
    return results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, nargs="+", default=[8, 12, 16, 20])
    ap.add_argument("--shots", type=float, nargs="+", default=[1e5, 1e6, 1e7])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = ["python"]
    try:
        kernels.get_backend("compiled")
        backends.insert(0, "compiled")
    except Exception:
        print("compiled backend unavailable; timing the python fallback only")

    print(f"{'kernel':<10}{'size':>12}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for n in args.qubits:
        res = bench_qft(n, args.repeat, backends)
        if len(backends) == 2:
            diff = np.max(np.abs(res["compiled"][1].amplitudes - res["python"][1].amplitudes))
            assert diff < 1e-12, f"backends disagree by {diff}"
        times = [res[b][0] for b in backends]
        speed = f"{times[-1] / times[0]:>9.1f}x" if len(times) == 2 else ""
        print(f"{'qft':<10}{'L=' + str(n):>12}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)
    for s in args.shots:
        shots = int(s)
        res = bench_sampling(shots, args.repeat, backends)
        if len(backends) == 2:
            assert np.array_equal(res["compiled"][1].counts, res["python"][1].counts), "histograms differ"
        times = [res[b][0] for b in backends]
        speed = f"{times[-1] / times[0]:>9.1f}x" if len(times) == 2 else ""
        print(f"{'shots':<10}{shots:>12}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
