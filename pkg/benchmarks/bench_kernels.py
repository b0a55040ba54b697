"""Compare the numba loop kernels with the pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat N] [--sweep]

Each kernel is called on the same inputs through both namespaces; the
first numba call (compilation) is excluded.  ``--sweep`` also times a
whole Yoshida sweep in two subprocesses, one per CROSSHOM_BACKEND value.
"""
from __future__ import annotations

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from crosshom import kernels
from crosshom._backend import HAS_NUMBA
from crosshom.catalog import group_from_label
from crosshom.group import generating_sequence

HOM_PAIRS = [("symmetric:4", "symmetric:4"), ("dicyclic:24", "dihedral:24"),
             ("abelian:4,2,2", "abelian:4,4"), ("alternating:4*cyclic:2", "symmetric:4")]


def _hom_args(f: str, g: str):
    F, G = group_from_label(f), group_from_label(g)
    gens = np.asarray(generating_sequence(F), np.int64)
    lists = [np.flatnonzero(F.orders[x] % G.orders == 0) for x in gens]
    width = max(len(c) for c in lists)
    cand = np.zeros((len(lists), width), np.int64)
    ncand = np.array([len(c) for c in lists], np.int64)
    for i, c in enumerate(lists):
        cand[i, : len(c)] = c
    return F.table, G.table, gens, cand, ncand, 10**8


def cases():
    S4 = group_from_label("symmetric:4")
    D24 = group_from_label("dihedral:24")
    big = group_from_label("dicyclic:24*cyclic:2")
    out = [
        ("element_orders S4", "element_orders", (S4.table,)),
        ("element_orders Dic24xC2", "element_orders", (big.table,)),
        ("assoc_violation D24", "assoc_violation",
         (D24.table, np.arange(D24.order, dtype=np.int64))),
        ("generated_mask Dic24xC2", "generated_mask", (big.table, np.array([1, 5], np.int64))),
    ]
    out += [(f"hom_search {f} -> {g}", "hom_search", _hom_args(f, g)) for f, g in HOM_PAIRS]
    return out


def bench(repeat: int) -> list[tuple[str, float, float]]:
    rows = []
    for name, fn, args in cases():
        loop, vec = getattr(kernels.LOOP, fn), getattr(kernels.NUMPY, fn)
        loop(*args)  # compile
        t_loop = min(timeit.repeat(lambda: loop(*args), number=1, repeat=repeat))
        t_np = min(timeit.repeat(lambda: vec(*args), number=1, repeat=repeat))
        rows.append((name, t_loop, t_np))
    return rows


def sweep_times() -> dict[str, float]:
    code = ("import time;from crosshom.checkers import SweepSpec, run_sweep;"
            "t=time.perf_counter();run_sweep(SweepSpec('yoshida', max_g=24, max_m=16));"
            "print(time.perf_counter()-t)")
    out = {}
    for backend in ("numba", "numpy"):
        env = dict(os.environ, CROSSHOM_BACKEND=backend)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                             text=True, check=True)
        out[backend] = float(res.stdout.strip())
    return out


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sweep", action="store_true", help="also time a full sweep per backend")
    args = ap.parse_args(argv)
    label = "numba" if HAS_NUMBA else "loop (numba unavailable)"
    print(f"{'kernel':46s} {label:>12s} {'numpy':>12s} {'ratio':>8s}")
    for name, t_loop, t_np in bench(args.repeat):
        print(f"{name:46s} {t_loop * 1e3:10.3f}ms {t_np * 1e3:10.3f}ms {t_np / t_loop:8.1f}")
    if args.sweep:
        for backend, t in sweep_times().items():
            print(f"yoshida sweep, {backend:5s} backend: {t:.2f}s")


if __name__ == "__main__":
    main()
