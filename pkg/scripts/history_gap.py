"""Spectral gap of the CAT history Hamiltonian and the pairwise-correlation traces.

Prints gap, gap * n^2 and the trace quantities for each n. Sizes above 8 use
the sparse solver (2n qubits, so n = 10 means a 20-qubit eigenproblem).
"""

import argparse

from mhkit.certificates import eval_history_state
from mhkit.codes import groundspace, history_claims, history_hamiltonian
from mhkit.entropy import StateFamily, build_family


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 6, 8])
    args = ap.parse_args()
    print(f"{'n':>3} {'gap':>10} {'gap*n^2':>9} {'a_min':>7} {'b_min':>7} {'corr_min':>9} {'blowup_bound':>12}")
    for n in args.sizes:
        h = history_hamiltonian(n)
        gs = groundspace(h)
        c = history_claims(build_family(StateFamily("cat_history", n)), n)
        cert = eval_history_state(n, gs.gap, len(h.terms))
        print(f"{n:3d} {gs.gap:10.6f} {gs.gap * n * n:9.4f} {c['a_min']:7.4f} {c['b_min']:7.4f} "
              f"{c['correlation_min']:9.4f} {cert.bound:12.4f}")


if __name__ == "__main__":
    main()
