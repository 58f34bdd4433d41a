"""Empirical distribution of ||E|| / (sigma sqrt(n)) for each noise family.

Used to pick the spectral-norm constant c2: the certificate suite treats
``||E|| <= c2 sigma sqrt(n)`` as a measured precondition, so c2 should sit
above the observed maxima: about 2 for the dense families and up to
roughly 2.8 for sparse centered Bernoulli noise at small n.
"""
import argparse
import math

import numpy as np

from spectral_perturb.matcore import spectral_norm
from spectral_perturb.noise import FAMILIES, NoiseModel, sample_symmetric_noise


def calibrate(ns, trials, families=FAMILIES):
    rows = []
    for family in families:
        sigma = 0.1 if family == "bernoulli-centered" else 1.0
        for n in ns:
            vals = []
            for seed in range(trials):
                e = sample_symmetric_noise(NoiseModel(family, sigma, seed=seed), n)
                vals.append(spectral_norm(e) / (sigma * math.sqrt(n)))
            vals = np.array(vals)
            rows.append((family, n, vals.mean(), vals.max()))
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[100, 400, 1000])
    ap.add_argument("--trials", type=int, default=20)
    args = ap.parse_args()
    print(f"{'family':<22}{'n':>6}{'mean':>10}{'max':>10}")
    for family, n, mean, mx in calibrate(args.n, args.trials):
        print(f"{family:<22}{n:>6}{mean:>10.4f}{mx:>10.4f}")
