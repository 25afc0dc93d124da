"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run: python benchmarks/bench_kernels.py
Covers the two hot paths: batched jet products (the inner operation of
every field evaluation) and the RK4 transport scan (the inner loop of
parallel transport).  Also times one end-to-end holonomy classification
under the active kernel selection.
"""

from __future__ import annotations

import time

import numpy as np

from confgeo import _kernels_numba, _kernels_numpy


def _time(fn, *args, repeat=7, warmup=2):
    for _ in range(warmup):
        fn(*args)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return np.mean(times), np.std(times)


def _print_row(label, numba_t, numpy_t):
    m_nb, s_nb = numba_t
    m_np, s_np = numpy_t
    speedup = m_np / m_nb if m_nb > 0 else float("inf")
    print(f"{label:32s} numba {m_nb*1e6:10.1f} +- {s_nb*1e6:6.1f} us"
          f"   numpy {m_np*1e6:10.1f} +- {s_np*1e6:6.1f} us"
          f"   speedup {speedup:5.2f}x")


def bench_jet_mul(batch, n, order):
    rng = np.random.default_rng(0)
    args = [np.ascontiguousarray(rng.normal(size=s)) for s in
            [(batch,), (batch, n), (batch, n, n), (batch, n, n, n)] * 2]
    if order == 2:
        a = args[:3] + args[4:7]
        fn_nb, fn_np = _kernels_numba.jet_mul_o2, _kernels_numpy.jet_mul_o2
    else:
        a = args[:4] + args[4:]
        fn_nb, fn_np = _kernels_numba.jet_mul_o3, _kernels_numpy.jet_mul_o3
    _print_row(f"jet_mul o{order} B={batch} n={n}",
               _time(fn_nb, *a), _time(fn_np, *a))


def bench_rk4(steps, n, loops):
    rng = np.random.default_rng(1)
    a = np.ascontiguousarray(rng.normal(size=(2 * steps + 1, n, n)) * 0.05)
    h = 1.0 / steps

    def run(fn):
        for _ in range(loops):
            fn(a, h)

    _print_row(f"rk4 transport m={steps} n={n} x{loops}",
               _time(run, _kernels_numba.rk4_transport),
               _time(run, _kernels_numpy.rk4_transport))


def bench_classify():
    from confgeo import kernels
    from confgeo.holonomy import classify_holonomy
    from confgeo.library import warped_block_metric

    g = warped_block_metric()
    t0 = time.perf_counter()
    cls = classify_holonomy(g, rng=np.random.default_rng(0), samples=150)
    dt = time.perf_counter() - t0
    print(f"\nend-to-end classify_holonomy ({kernels.IMPLEMENTATION} kernels): "
          f"{dt*1e3:.0f} ms, label {cls.label}")


def main():
    print("kernel benchmarks (numba vs pure-numpy fallback)\n")
    for batch in (1, 64, 4096):
        bench_jet_mul(batch, 4, 2)
    for batch in (1, 64, 4096):
        bench_jet_mul(batch, 4, 3)
    print()
    bench_rk4(200, 3, 20)
    bench_rk4(400, 4, 40)
    bench_classify()


if __name__ == "__main__":
    main()
