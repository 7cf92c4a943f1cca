"""Recover c in V = c * Vol and show the residual left by a curvature term.

    python scripts/volume_characterization.py [--count 20] [--seed 0]
"""

import argparse
import random
import sys
from fractions import Fraction

from valuationlab.core import rat_str
from valuationlab.corpus import standard_bodies
from valuationlab.grid import volume_characterization
from valuationlab.valuations import Combination, PhiL, Vol


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    bodies = standard_bodies()
    print("c0,c_recovered,certified,max_residual")
    for _ in range(args.count):
        c0 = Fraction(rng.randint(-60, 60), rng.randint(1, 15))
        rep = volume_characterization(Combination(((c0, Vol()),)), bodies, eps_list=(0.5,),
                                      samples=20)
        print(f"{rat_str(c0)},{rat_str(rep.c)},{rep.certified},{max(rep.residuals.values())}")
    rep = volume_characterization(Combination(((1, Vol()), (1, PhiL(0)))), bodies,
                                  eps_list=(0.5, 0.25), samples=50)
    print()
    print("body,residual_for_vol_plus_phi0")
    for name, res in rep.residuals.items():
        print(f"{name},{res}")
    print(f"# two-homogeneous: {rep.two_homogeneous}", file=sys.stderr)


if __name__ == "__main__":
    main()
