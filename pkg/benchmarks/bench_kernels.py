"""Compare the numba kernels with the numpy/scipy fallback route.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel is run once per backend to warm up (numba compiles on first
call), then timed ``--repeat`` times; the best time is reported together
with the largest difference between the two backends' results, relative
to the largest magnitude.
"""
import argparse
import time

import numpy as np

from floqamp import kernels
from floqamp.dynamics import MicroParams, _pack, sample_times
from floqamp.green import green_function
from floqamp.model import DriveSpec, scaled_params, transient_params
from floqamp.sambe import build_sambe, default_truncation
from floqamp.topology import _doubled_curve, _k_grid


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_green(repeat):
    p = scaled_params(15.0)
    s = build_sambe(p, default_truncation(p))
    return {
        b: best_of(lambda: green_function(s, 0.1, backend=b).entries, repeat) for b in ("numba", "numpy")
    }


def bench_winding(repeat):
    p = scaled_params(19.5)
    curve = _doubled_curve(p, _k_grid(2048))
    offsets = p.omega_mod * (np.arange(-60, 61) + 0.25)
    return {
        b: best_of(lambda: kernels.winding_numbers(offsets, curve, backend=b)[0], repeat)
        for b in ("numba", "numpy")
    }


def bench_one_mode(repeat):
    p = transient_params()
    params = _pack(p, DriveSpec(1.0, -20))
    t = sample_times(p, (0.0, 25.0))
    y0 = np.zeros(1, complex)
    return {
        b: best_of(lambda: kernels.integrate_meanfield(params, y0, t, backend=b)[3][:, 0], repeat)
        for b in ("numba", "numpy")
    }


def bench_three_mode(repeat):
    p = transient_params().replace(eta_p=15.0)
    om = p.omega_mod
    micro = MicroParams.from_effective(p, 200 * om, 1200 * om)
    params = _pack(p, DriveSpec(1.0, -17), micro)
    t = sample_times(p, (0.0, 5.0))
    y0 = np.zeros(3, complex)
    return {
        b: best_of(lambda: kernels.integrate_meanfield(params, y0, t, backend=b)[3][:, 0], repeat)
        for b in ("numba", "numpy")
    }


BENCHES = {
    "green (tridiagonal inverse, dim 101)": bench_green,
    "winding (121 cells x 2048 k)": bench_winding,
    "one-mode ODE (25 periods)": bench_one_mode,
    "three-mode ODE (5 periods, stiff)": bench_three_mode,
}


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    print(f"{'kernel':40s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s} {'rel diff':>10s}")
    for name, bench in BENCHES.items():
        res = bench(args.repeat)
        (tn, a), (tp, b) = res["numba"], res["numpy"]
        a, b = np.asarray(a), np.asarray(b)
        diff = float(np.abs(a - b).max() / max(np.abs(b).max(), 1e-300))
        print(f"{name:40s} {tn:11.4g} {tp:11.4g} {tp / tn:8.2f} {diff:10.2e}")


if __name__ == "__main__":
    main()
