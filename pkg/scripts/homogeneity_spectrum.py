"""Degrees of the curvature-power valuations and of random box valuations.

For each exponent l the probe degree of phi_l is measured on a few bodies;
it should track 1 - l and so sweep the whole interval [0, 1]. The second
table fits lambda -> V(lambda K) exactly on random box valuations.

    python scripts/homogeneity_spectrum.py [--steps 11] [--boxes 20] [--seed 0]
"""

import argparse
import csv
import random
import sys
from fractions import Fraction

from valuationlab.core import rat_str
from valuationlab.corpus import standard_bodies
from valuationlab.decomposition import ComponentFamily, homogeneity_fit, random_box, reconstruct, subsets
from valuationlab.valuations import PhiL, homogeneity_probe


def curvature_rows(steps):
    bodies = {k: v for k, v in standard_bodies().items() if k in ("disk", "rounded_square", "half_disk")}
    for i in range(steps):
        l = i / (steps - 1)
        for name, K in bodies.items():
            probe = homogeneity_probe(PhiL(l), K, (0.5, 2.0, 3.0))
            yield {"l": l, "body": name, "degree": probe.degree, "expected": 1 - l,
                   "defect": probe.defect}


def box_rows(count, seed):
    rng = random.Random(seed)
    for k in range(count):
        n = rng.randint(1, 4)
        coeffs = {I: Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for I in subsets(n)}
        V = reconstruct(ComponentFamily.from_coefficients(n, coeffs))
        fit = homogeneity_fit(V, random_box(rng, n), [Fraction(j, 2) for j in range(1, n + 5)])
        yield {"valuation": k, "n": n, "degrees": " ".join(map(str, fit.degrees)),
               "coefficients": " ".join(rat_str(c) for c in fit.coefficients),
               "residual": rat_str(fit.residual)}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=11)
    ap.add_argument("--boxes", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for rows in (list(curvature_rows(args.steps)), list(box_rows(args.boxes, args.seed))):
        w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        print()


if __name__ == "__main__":
    main()
