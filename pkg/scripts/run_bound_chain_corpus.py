#!/usr/bin/env python3
"""Bound-chain survey over the seeded random spec corpus.

For each gapped random chain it checks chi_E <= chi_F <= <Hb^2>_c / gap^2
and prints the chi_E/chi_F slack histogram plus the worst ratios seen.
"""

import argparse

import numpy as np

from entsus.models import random_gapped_corpus
from entsus.susceptibility import susceptibility_report


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=200)
    parser.add_argument("--seed", type=int, default=20240501)
    args = parser.parse_args()

    ratios = []
    violations = 0
    worst_f_over_bound = 0.0
    for spec in random_gapped_corpus(args.count, seed=args.seed):
        rep = susceptibility_report(spec)
        if not rep.chain_satisfied(1e-9):
            violations += 1
        if rep.chi_f > 0:
            ratios.append(rep.chi_e / rep.chi_f)
        if rep.correlator_bound > 0:
            worst_f_over_bound = max(worst_f_over_bound, rep.chi_f / rep.correlator_bound)

    hist, edges = np.histogram(ratios, bins=10, range=(0.0, 1.0))
    print(f"{args.count} specs, {violations} bound-chain violations")
    print(f"max chi_F / correlator_bound = {worst_f_over_bound:.4f}")
    print("chi_E / chi_F histogram:")
    for i, count in enumerate(hist):
        bar = "#" * count
        print(f"  [{edges[i]:.1f}, {edges[i + 1]:.1f})  {count:>4d}  {bar}")


if __name__ == "__main__":
    main()
