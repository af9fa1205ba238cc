#!/usr/bin/env python3
"""Run the convergence-verification suites and print observed rates.

Usage: python scripts/run_verification.py [--n-grid 64] [--full]

--full runs the spatial ladder up to 256^3 (long; hours on one core).
Equivalent CLI: `sim verify --suite temporal1|temporal2|spatial|poisson|fermi`.
"""

import argparse
import sys
import time

from ferrosim.verification import (fermi_accuracy, poisson_manufactured_errors,
                                   run_suite)


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-grid", type=int, default=64)
    ap.add_argument("--full", action="store_true")
    args = ap.parse_args()

    t0 = time.perf_counter()
    print("suite            quantity  E_coarse      E_fine        rate")
    for suite, base_dt in (("temporal_order1", 5e-14),
                           ("temporal_order2", 5e-14),
                           ("spatial", 2.5e-14)):
        n = args.n_grid * (2 if args.full and suite == "spatial" else 1)
        for r in run_suite(suite, n_grid=n, base_dt=base_dt):
            print(f"{r.suite:<16} {r.quantity:<9} {r.E_cm:<13.4e} "
                  f"{r.E_mf:<13.4e} {r.rate:.3f}")

    import math
    ns = (32, 64, 128)
    errs, cycles = poisson_manufactured_errors(ns)
    for (na, ea), (nb, eb) in zip(zip(ns, errs), zip(ns[1:], errs[1:])):
        print(f"poisson          Phi       {ea:<13.4e} {eb:<13.4e} "
              f"{math.log2(ea / eb):.3f}   (n={na}->{nb}, <= {max(cycles)} V-cycles)")

    max_rel, mb_dev = fermi_accuracy()
    print(f"fermi            F_1/2     max rel err {max_rel:.2e}, "
          f"MB tail deviation {mb_dev:.2e}")
    print(f"total {time.perf_counter() - t0:.0f} s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
