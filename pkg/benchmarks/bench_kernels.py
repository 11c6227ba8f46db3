"""Time the pure-Python and compiled kernels on the same inputs.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from kgvacua import kernels


def cases(mod):
    fs = np.linspace(0.1, 0.3, 2001)
    al = np.ones(2001)
    be = np.linspace(1.0, 2.0, 2001)
    lam = np.linspace(0.0, 4.0, 64)
    return {
        "hyp0f1": lambda: mod.hyp0f1(1.5 + 0.5j, -30.0 + 4j),
        "hyp1f1": lambda: mod.hyp1f1(0.25 + 0.5j, 1.5, 12.0 - 3j),
        "airy_maclaurin": lambda: mod.airy_maclaurin(-6.5),
        "taylor_march": lambda: mod.taylor_march(kernels.BESSEL, 0.5j, 0.0, 3.0 + 0j, 0.2 + 0.1j, -0.3 + 0j,
                                                 30.0 + 0j),
        "rk4_modes": lambda: mod.rk4_modes(fs, al, be, lam, 1e-3, 1000),
    }


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    mods = kernels.backends()
    table = {name: {k: min(timeit.repeat(fn, number=1, repeat=args.repeat)) for k, fn in cases(mod).items()}
             for name, mod in mods.items()}
    names = list(mods)
    print(f"{'kernel':16s}" + "".join(f"{n:>14s}" for n in names) + ("      speedup" if len(names) > 1 else ""))
    for k in table["python"]:
        row = f"{k:16s}" + "".join(f"{table[n][k] * 1e3:12.3f}ms" for n in names)
        if "compiled" in table:
            row += f"{table['python'][k] / table['compiled'][k]:12.1f}x"
        print(row)


if __name__ == "__main__":
    main()
