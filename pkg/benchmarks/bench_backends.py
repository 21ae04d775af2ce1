"""Compare the compiled kernels against the pure-Python fallback.

Both backends produce bit-identical traces (asserted here as well); the
point of this script is the wall-clock ratio.

    python benchmarks/bench_backends.py [--horizon 20000] [--k 12]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from copeland_bandits import _kernels, ccb, rucb, scb
from copeland_bandits.prefmat import fixture, gen_cyclic_copeland


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def bench(label, fn, matrix, *args, horizon, seed=17, **kw):
    pure, t_pure = timed(fn, matrix, *args, horizon, seed, backend="pure", **kw)
    if _kernels.backend_name() != "compiled":
        print(f"{label:<28} pure {t_pure:8.3f}s   (compiled core not built)")
        return
    comp, t_comp = timed(fn, matrix, *args, horizon, seed, backend="compiled", **kw)
    assert np.array_equal(pure.steps, comp.steps)
    assert np.array_equal(pure.cumulative_regret, comp.cumulative_regret)
    ratio = t_pure / t_comp if t_comp > 0 else float("inf")
    print(
        f"{label:<28} pure {t_pure:8.3f}s   compiled {t_comp:8.3f}s "
        f"  speedup {ratio:7.1f}x   (traces identical)"
    )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--horizon", type=int, default=20_000)
    parser.add_argument("--k", type=int, default=12)
    args = parser.parse_args()

    print(f"active backend: {_kernels.backend_name()}")
    p4 = fixture("P4")
    big = gen_cyclic_copeland(args.k, 0.1)

    bench("ccb  P4", ccb.run, p4, 0.51, horizon=args.horizon)
    bench(f"ccb  cyclic(K={args.k})", ccb.run, big, 0.51, horizon=args.horizon)
    bench("rucb P4", rucb.run, p4, 0.51, horizon=args.horizon)
    bench("scb  P4", scb.run, p4, horizon=args.horizon)
    bench(f"scb  cyclic(K={args.k})", scb.run, big, horizon=args.horizon)


if __name__ == "__main__":
    main()
