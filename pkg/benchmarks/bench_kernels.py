"""Compare the compiled kernel core against the pure-Python fallback.

Run after installing the package:

    python benchmarks/bench_kernels.py

Covers the operations that dominate the Monte Carlo loops: GF(2) rank
and echelon reduction, extension-field products, and one end-to-end
decoding-failure trial at the acceptance-test shape.
"""

import os
import time

import numpy as np

# resolve both kernel implementations regardless of the ambient setting
os.environ.pop("LOCLAB_PURE", None)

from loclab import _pykernels, backend  # noqa: E402
from loclab.channel import ChannelModel, RankPmf  # noqa: E402
from loclab.fields import GF  # noqa: E402
from loclab.linear_codes import failure_rate_mc, make_generator  # noqa: E402
from loclab.rng import make_rng  # noqa: E402


def timeit(fn, repeats):
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_pair(name, compiled_fn, pure_fn, repeats):
    tc = timeit(compiled_fn, repeats) if backend.COMPILED else float("nan")
    tp = timeit(pure_fn, repeats)
    speedup = tp / tc if backend.COMPILED else float("nan")
    print(f"{name:<42} compiled {tc * 1e6:10.1f} us   pure {tp * 1e6:10.1f} us"
          f"   speedup {speedup:6.1f}x")


def main():
    print(f"backend selected at import: {backend.backend_name()}")
    if not backend.COMPILED:
        print("compiled extension unavailable; timing the fallback only\n")
    rng = np.random.default_rng(0)

    f2 = GF(2)
    a2 = rng.integers(0, 2, size=(48, 128), dtype=np.int64)
    bench_pair(
        "GF(2) rank, 48 x 128",
        lambda: backend.rank(a2, f2),
        lambda: _pykernels.rank(a2, f2),
        200,
    )
    bench_pair(
        "GF(2) rref, 48 x 128",
        lambda: backend.rref(a2, f2),
        lambda: _pykernels.rref(a2, f2),
        100,
    )

    f3 = GF(3)
    a3 = rng.integers(0, 3, size=(64, 64), dtype=np.int64)
    bench_pair(
        "GF(3) rref, 64 x 64",
        lambda: backend.rref(a3, f3),
        lambda: _pykernels.rref(a3, f3),
        50,
    )

    f256 = GF(2, 8)
    x = rng.integers(0, 256, size=(48, 48), dtype=np.int64)
    y = rng.integers(0, 256, size=(48, 48), dtype=np.int64)
    bench_pair(
        "GF(256) matmul, 48 x 48",
        lambda: backend.matmul(x, y, f256),
        lambda: _pykernels.matmul(x, y, f256),
        50,
    )
    bench_pair(
        "GF(256) rref, 48 x 48",
        lambda: backend.rref(x, f256),
        lambda: _pykernels.rref(x, f256),
        50,
    )

    # the acceptance-test shape: decoding failure Monte Carlo
    model = ChannelModel(f2, 4, 2, 2, "rank_uniform",
                         rank_pmf=RankPmf((0.0, 0.5, 0.5)))
    code = make_generator(f2, 4, 2, 64, 0.75, seed=1)
    trials = 300

    def compiled_mc():
        failure_rate_mc(model, code, trials, make_rng(1))

    def pure_mc():
        saved = backend._ext
        backend._ext = None
        backend.COMPILED = False
        try:
            failure_rate_mc(model, code, trials, make_rng(1))
        finally:
            backend._ext = saved
            backend.COMPILED = saved is not None

    t_mc_c = timeit(compiled_mc, 3) / trials
    t_mc_p = timeit(pure_mc, 1) / trials
    print(f"{'failure MC per trial (n=64 blocks)':<42} compiled {t_mc_c * 1e6:10.1f} us"
          f"   pure {t_mc_p * 1e6:10.1f} us   speedup {t_mc_p / t_mc_c:6.1f}x")


if __name__ == "__main__":
    main()
