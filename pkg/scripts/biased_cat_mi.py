"""Mutual information of the biased CAT family against H(gamma), and the
depth certificate its premises yield."""

import argparse

import numpy as np

from mhkit.certificates import check_mi_premises, eval_mi_bound
from mhkit.entropy import StateFamily, binary_entropy, build_family, mutual_info_dense


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--eps", type=float, default=1e-3)
    args = ap.parse_args()
    print(f"{'gamma':>6} {'I(0:n/2)':>10} {'H(gamma)':>10} {'bound':>7} branch")
    for g in np.linspace(0.05, 0.5, 10):
        psi = build_family(StateFamily("biased_cat", args.n, float(g)))
        val = mutual_info_dense(psi, [0], [args.n // 2]).value
        prem = check_mi_premises(psi, 2)
        cert = eval_mi_bound(prem.alpha, prem.beta, 2, args.eps, 1, args.n)
        print(f"{g:6.2f} {val:10.6f} {binary_entropy(float(g)):10.6f} {cert.bound:7.3f} {cert.branch}")


if __name__ == "__main__":
    main()
