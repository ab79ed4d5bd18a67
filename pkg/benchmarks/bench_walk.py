"""Compare the compiled and NumPy stepping kernels on batched exit times.

Usage: python3 benchmarks/bench_walk.py [--samples N] [--horizon H] [--repeat R]
"""
import argparse
import time

import numpy as np

from orrw import _walk_py
from orrw.fixtures import fixture
from orrw.graphs import cover_family
from orrw.simulate import _csr, exit_times, family_table

try:
    from orrw import _walk
except ImportError:
    _walk = None


def timed(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--horizon", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [("numpy", _walk_py.advance)]
    if _walk is not None:
        backends.insert(0, ("compiled", _walk.advance))
    else:
        print("compiled extension not built; timing the NumPy kernel only")
    print(f"{'graph':10s} {'delta':>6s} " + " ".join(f"{n:>10s}" for n, _ in backends) + "   speedup  same")
    for name, delta in [("star3", 1.0), ("path4", 2.0), ("lollipop", 0.5), ("cycle4", 5.0)]:
        g = fixture(name)
        fam = cover_family(g)
        times, outs = [], []
        for _, adv in backends:
            t, out = timed(lambda: exit_times(g, delta, fam, args.horizon, args.samples,
                                              seed=0, backend=adv), args.repeat)
            times.append(t)
            outs.append(out)
        same = all(np.array_equal(outs[0], o) for o in outs[1:])
        speed = times[-1] / times[0] if len(times) > 1 else 1.0
        print(f"{name:10s} {delta:6g} " + " ".join(f"{t:9.3f}s" for t in times)
              + f"   {speed:6.2f}x  {same}")

    print("\nkernel only (uniforms drawn up front)")
    rng = np.random.default_rng(0)
    for name, delta in [("star3", 1.0), ("lollipop", 0.5)]:
        g = fixture(name)
        ptr, nbr, edge = _csr(g)
        table = family_table(g, cover_family(g))
        U = rng.random((args.samples, args.horizon))
        row = []
        for bname, adv in backends:
            def go():
                v = np.full(args.samples, g.start, dtype=np.int64)
                m = np.zeros(args.samples, dtype=np.int64)
                s = np.full(args.samples, -1, dtype=np.int64)
                adv(ptr, nbr, edge, delta, table, U, v, m, s, 0)
                return s
            t, _ = timed(go, args.repeat)
            row.append(f"{bname} {t:.4f}s")
        print(f"{name:10s} " + "   ".join(row))


if __name__ == "__main__":
    main()
