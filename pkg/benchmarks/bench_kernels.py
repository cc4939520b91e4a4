"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""
import argparse
import json
import timeit

import numpy as np

from blindrank import kernels


def cases(rng):
    for n in (100, 250, 500):
        u = np.abs(rng.standard_normal(n))
        uh = u + 0.05 * rng.standard_normal(n)
        taus = np.linspace(0, 0.5, 20)
        truth = kernels.get_backend("python").pair_codes(u, 0.0, False)
        est = kernels.get_backend("python").pair_codes(uh, 0.02, True)
        yield f"pair_codes n={n}", lambda k, uh=uh: k.pair_codes(uh, 0.02, True)
        yield f"concordance_counts n={n}", lambda k, t=truth, e=est: k.concordance_counts(t, e)
        yield f"min_viable_threshold n={n}", lambda k, u=u, uh=uh: k.min_viable_threshold(u, uh, 0.0)
        yield f"tau_sweep n={n} x20", lambda k, u=u, uh=uh, t=taus: k.tau_sweep(u, uh, t, 0.0)
    for n in (16, 32, 64):
        x = rng.standard_normal((n, n))
        a = x @ x.T
        yield f"jacobi_eigh n={n}", lambda k, a=a: k.jacobi_eigh(a)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json")
    args = ap.parse_args(argv)
    names = [b for b in ("python", "compiled") if b in kernels.BACKENDS]
    rows = []
    print(f"{'kernel':32s}" + "".join(f"{b:>14s}" for b in names) + ("   speedup" if len(names) == 2 else ""))
    for label, fn in cases(np.random.default_rng(0)):
        times = {}
        for b in names:
            k = kernels.get_backend(b)
            number = 1 if label.startswith("jacobi") and b == "python" else 10
            best = min(timeit.repeat(lambda: fn(k), number=number, repeat=args.repeat)) / number
            times[b] = best
        line = f"{label:32s}" + "".join(f"{times[b] * 1e3:12.3f}ms" for b in names)
        if len(names) == 2:
            line += f"{times['python'] / times['compiled']:9.1f}x"
        print(line)
        rows.append({"kernel": label, **{f"{b}_seconds": t for b, t in times.items()}})
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
