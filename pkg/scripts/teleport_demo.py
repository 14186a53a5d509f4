"""Gate-teleport a random Clifford circuit and check random outcome vectors.

Reports how the one-round program's width and quantum depth scale with the
number of stages, and the size of the coherent fanout realization.
"""

import argparse

import numpy as np

from mhkit.circuit import account, random_circuit
from mhkit.compile import clifford_to_fanout, teleport_parallelize, teleported_output
from mhkit.pauli import PauliString, canonicalize, random_tableau
from mhkit.simulate import DEFAULT_SEED, run_measurement_program, tableau_run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--depth", type=int, default=12)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    c = random_circuit(args.n, args.depth, rng, "clifford")
    t0 = random_tableau(args.n, rng)
    want = tableau_run(c, t0)
    print(f"{'layers/stage':>12} {'stages':>6} {'width':>6} {'q-depth':>7} {'outcomes':>8} {'fanout width':>12} "
          f"{'fanout layers':>13} mismatches")
    for lps in sorted({1, 2, 3, args.depth}):
        prog, cmap = teleport_parallelize(c, lps)
        gens = [g.embedded(prog.n, range(args.n)) for g in t0.generators]
        gens += [PauliString.single(prog.n, q, "Z") for q in range(args.n, prog.n)]
        start = canonicalize(gens, n=prog.n)
        bad = 0
        for _ in range(args.trials):
            st, tr = run_measurement_program(prog, start, seed=int(rng.integers(1 << 62)))
            bad += teleported_output(prog, st, tr) != want
        w = clifford_to_fanout(c, lps)
        print(f"{lps:12d} {cmap.stages:6d} {prog.n:6d} {prog.rounds[0].block.depth:7d} {prog.num_outcomes:8d} "
              f"{w.n:12d} {account(w).fanout_layers:13d} {bad}")


if __name__ == "__main__":
    main()
