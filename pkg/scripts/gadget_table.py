"""Width, depth and alternation counts of the EX^k / TH^t gadgets."""

import argparse

from mhkit.compile import build_exact_gadget, build_threshold_gadget


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-m", type=int, default=5)
    args = ap.parse_args()
    print(f"{'gadget':>10} {'clean':>5} {'width':>6} {'depth':>6} {'C':>3} {'Q':>3} {'MH':>3} {'ceiling':>7} ok")
    for m in range(1, args.max_m + 1):
        reps = [build_exact_gadget(m, k, c) for k in range(m + 1) for c in (False, True)]
        reps += [build_threshold_gadget(m, t, c) for t in range(m + 2) for c in (False, True)]
        for r in reps:
            a = r.accounting
            ok = r.correct and r.within_ceiling and (r.restored or not r.clean)
            print(f"{r.name:>10} {str(r.clean):>5} {r.circuit.n:6d} {a.depth:6d} {a.clifford_rounds:3d} "
                  f"{a.qnc0_rounds:3d} {a.mh_level:3d} {r.ceiling:7d} {ok}")


if __name__ == "__main__":
    main()
