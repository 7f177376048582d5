#!/usr/bin/env python3
"""Sweep lens-space chains and confirm the d-invariant multisets against
the independent recursive oracle, printing one table row per (p, q)."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from math import gcd

from plumb import engine
from plumb.catalog import lens_chain
from plumb.lattice import QFormContext


@dataclass(frozen=True)
class SweepConfig:
    max_p: int
    verbose: bool


def parse_args(argv=None) -> SweepConfig:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-p", type=int, default=12, help="largest p to sweep")
    ap.add_argument("--verbose", action="store_true", help="print multisets")
    ns = ap.parse_args(argv)
    return SweepConfig(max_p=ns.max_p, verbose=ns.verbose)


def main(argv=None) -> int:
    cfg = parse_args(argv)
    bad = 0
    print(f"{'p':>4} {'q':>4} {'chain':<24} {'classes':>8} {'ok':>4} {'time':>8}")
    for p in range(2, cfg.max_p + 1):
        for q in range(1, p):
            if gcd(p, q) != 1:
                continue
            t0 = time.perf_counter()
            forest = lens_chain(p, q)
            ctx = QFormContext(forest)
            dinv = engine.d_invariants(ctx)
            got = tuple(sorted(dinv.dual))
            want = engine.lens_d_multiset(p, q)
            ok = got == want
            bad += not ok
            elapsed = time.perf_counter() - t0
            chain = ",".join(str(w) for w in forest.weights)
            print(
                f"{p:>4} {q:>4} {chain:<24} {ctx.h1:>8} "
                f"{'yes' if ok else 'NO':>4} {elapsed:>7.3f}s"
            )
            if cfg.verbose or not ok:
                print(f"       got:  {[str(x) for x in got]}")
                print(f"       want: {[str(x) for x in want]}")
    if bad:
        print(f"{bad} mismatches", file=sys.stderr)
        return 1
    print("all multisets match the oracle")
    return 0


if __name__ == "__main__":
    sys.exit(main())
