"""Time the numba and numpy RK4 kernels on the same batch.

    python3 benchmarks/bench_rk4.py [--batch 11] [--steps 200000]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from omitkit import _kernels
from omitkit.oracle import OracleConfig
from omitkit.params import ReducedParams
from omitkit.response import ideal_beta


def batch_args(batch: int, steps: int):
    p = ReducedParams.from_ratio(1.0, Q=1e2)
    p = p.with_beta(ideal_beta(p))
    cfgs = [OracleConfig(p, p.omega_m, p.omega_m + x, 1e-3)
            for x in np.linspace(-5, 5, batch) * p.gamma]
    col = lambda f: np.array([f(c) for c in cfgs])
    return (col(lambda c: c.Q0), np.zeros(batch), col(lambda c: c.c0).astype(complex),
            np.zeros(batch), col(lambda c: c.dt), steps,
            col(lambda c: c.reduced.kappa), col(lambda c: c.reduced.gamma),
            col(lambda c: c.reduced.omega_m), col(lambda c: c.coupling),
            col(lambda c: c.eps_c), col(lambda c: c.eps_p), col(lambda c: c.detuning0),
            col(lambda c: c.delta), 0, np.full(batch, 1e12))


def timed(fn, args, repeat: int):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--batch", type=int, default=11)
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    a = ap.parse_args(argv)
    args = batch_args(a.batch, a.steps)
    results = {}
    if _kernels.rk4_numba is not None:
        _kernels.rk4_numba(*batch_args(a.batch, 10))   # compile outside the timing
        results["numba"] = timed(_kernels.rk4_numba, args, a.repeat)
    results["numpy"] = timed(_kernels.rk4_numpy, args, a.repeat)
    work = a.batch * a.steps
    for name, (t, _) in results.items():
        print(f"{name:6s} {t:8.3f} s  {work / t / 1e6:8.2f} Msteps/s")
    if len(results) == 2:
        cn, cp = results["numba"][1][2], results["numpy"][1][2]
        print(f"speedup {results['numpy'][0] / results['numba'][0]:.1f}x, "
              f"max |c_numba - c_numpy| = {np.max(np.abs(cn - cp)):.2e}")


if __name__ == "__main__":
    main()
