"""Run every reproduction suite and print one line per acceptance criterion."""

import argparse
import sys

from mhkit.simulate import DEFAULT_SEED
from mhkit.suites import SUITES, run_suite


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    ap.add_argument("--only", nargs="*", choices=list(SUITES), default=list(SUITES))
    args = ap.parse_args()
    ok = True
    for name in args.only:
        r = run_suite(name, seed=args.seed)
        ok &= r.passed
        print(f"{'PASS' if r.passed else 'FAIL'} [{r.criterion:2d}] {name:17s} {r.elapsed:7.1f} s  {r.details}")
        for f in r.failures[:3]:
            print("    ", f)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
