#!/usr/bin/env python3
"""Run the uniqueness and classification verifiers over a grid of sizes
and weight floors, printing a timing/result row for each setting."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass

from plumb import census


@dataclass(frozen=True)
class SweepConfig:
    e8_max: int
    class_max: int
    min_weight: int


def parse_args(argv=None) -> SweepConfig:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--e8-max", type=int, default=10, help="largest n for the uniqueness scan")
    ap.add_argument("--class-max", type=int, default=7, help="largest n for the classification scan")
    ap.add_argument("--min-weight", type=int, default=-5)
    ns = ap.parse_args(argv)
    return SweepConfig(e8_max=ns.e8_max, class_max=ns.class_max, min_weight=ns.min_weight)


def main(argv=None) -> int:
    cfg = parse_args(argv)
    failed = False

    print("unimodular L-space uniqueness scan")
    print(f"{'nmax':>6} {'trees':>10} {'negdef':>10} {'unimodular':>34} {'ok':>4} {'time':>9}")
    for nmax in range(8, cfg.e8_max + 1):
        t0 = time.perf_counter()
        rep = census.verify_e8_unique(nmax)
        dt = time.perf_counter() - t0
        codes = ";".join(rep.unimodular_codes) or "-"
        print(
            f"{rep.nmax:>6} {rep.trees_scanned:>10} {rep.negdef_count:>10} "
            f"{codes:>34} {'yes' if rep.ok else 'NO':>4} {dt:>8.2f}s"
        )
        failed |= not rep.ok

    print("\nbasic-vector classification scan")
    print(f"{'nmax':>6} {'wmin':>6} {'unimod':>8} {'case2':>8} {'case3':>8} {'ok':>4} {'time':>9}")
    for nmax in range(4, cfg.class_max + 1):
        t0 = time.perf_counter()
        rep = census.verify_classification(nmax, cfg.min_weight)
        dt = time.perf_counter() - t0
        print(
            f"{rep.nmax:>6} {rep.wmin:>6} {rep.unimodular_checked:>8} "
            f"{rep.case2_checked:>8} {rep.case3_checked:>8} "
            f"{'yes' if rep.ok else 'NO':>4} {dt:>8.2f}s"
        )
        if rep.counterexamples:
            for code in rep.counterexamples:
                print(f"       counterexample: {code}")
        failed |= not rep.ok

    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
