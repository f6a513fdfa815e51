"""Sweep the error probability and report how much the statistical and Bures
line elements shrink under depolarization.

    python3 scripts/monotonicity_sweep.py --count 2000 --seed 1

Prints a CSV: p, f, then min/median/max of the ratio ds2_depolarized / ds2
for each metric over the sampled (P, dP) pairs.
"""

import argparse
import csv
import sys

import numpy as np

from qgeo.channel import contraction_factor
from qgeo.metric import (
    bures_line_element,
    bures_line_element_depolarized,
    line_element_bloch,
    line_element_depolarized,
)
from qgeo.verify import TANGENT_SCALE, sample_rng, uniform_ball, unit_vector


def draw(seed, count, cap):
    p, dp = [], []
    for i in range(count):
        rng = sample_rng(seed, 100, i)
        p.append(uniform_ball(rng, cap))
        dp.append(TANGENT_SCALE * unit_vector(rng))
    return np.array(p), np.array(dp)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--count", type=int, default=2000)
    ap.add_argument("--cap", type=float, default=0.99)
    ap.add_argument("--steps", type=int, default=21)
    args = ap.parse_args(argv)

    p, dp = draw(args.seed, args.count, args.cap)
    stat = line_element_bloch(p, dp)
    bures = bures_line_element(p / 2, dp / 2)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["p", "f", "stat_min", "stat_median", "stat_max", "bures_min", "bures_median", "bures_max"])
    for prob in np.linspace(0.0, 1.0, args.steps):
        rs = line_element_depolarized(p, dp, prob) / stat
        rb = bures_line_element_depolarized(p / 2, dp / 2, prob) / bures
        w.writerow(
            [f"{prob:.4f}", f"{contraction_factor(prob):.6f}"]
            + [f"{v:.6e}" for v in (rs.min(), np.median(rs), rs.max(), rb.min(), np.median(rb), rb.max())]
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
