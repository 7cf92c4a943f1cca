"""Value gaps along Hausdorff-convergent sequences.

Two tables: the singular-part valuation on inscribed 2^j-gons tending to the
unit disk, and the upper-half-indicator valuation on triangles whose first
edge normal rotates to 0 from below. A gap that stays away from 0 while the
Hausdorff distance shrinks witnesses discontinuity.

    python scripts/discontinuity_witnesses.py [--max-exponent 14]
"""

import argparse
import csv
import math
import sys

from valuationlab.grid import (
    UPPER_HALF_INDICATOR,
    continuity_probe,
    ngon_sequence,
    triangle_sequence,
)
from valuationlab.valuations import Perimeter, PhiF, PhiSing


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-exponent", type=int, default=14)
    args = ap.parse_args()
    exps = list(range(3, args.max_exponent + 1))
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["sequence", "valuation", "j", "hausdorff", "value_gap", "closed_form_gap"])
    seq, limit = ngon_sequence(exps)
    for name, V in (("phi_sing", PhiSing()), ("perimeter", Perimeter())):
        rep = continuity_probe(V, seq, limit)
        for j, (d, gap) in zip(exps, rep.rows):
            closed = 2 * 2 ** j * math.sin(math.pi / 2 ** j) if name == "phi_sing" else ""
            w.writerow(["ngon", name, j, d, gap, closed])
        print(f"# ngon / {name}: {rep.verdict}", file=sys.stderr)
    tseq, tlimit = triangle_sequence(exps)
    rep = continuity_probe(PhiF(UPPER_HALF_INDICATOR), tseq, tlimit)
    for j, (d, gap) in zip(exps, rep.rows):
        w.writerow(["triangle", "phi_f_upper_half", j, d, gap, ""])
    print(f"# triangle / phi_f_upper_half: {rep.verdict}", file=sys.stderr)


if __name__ == "__main__":
    main()
