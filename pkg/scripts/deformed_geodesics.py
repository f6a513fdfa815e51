"""Write deformed great circles for a ladder of error probabilities.

    python3 scripts/deformed_geodesics.py --out-dir geodesics/ --count 128

One CSV per p (same columns as ``qgeo geodesic``), plus a summary on stdout
of how far the projected curves move toward the maximally mixed state.
"""

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from qgeo.geodesic import CSV_HEADER, frame_from_seed, sample_geodesic, sample_rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--frame", default="0.8,0.6,0,0,0,0,0.6,0.8", help="eight reals: seed vectors u, v")
    ap.add_argument("--probs", default="0,0.15,0.3,0.45,0.6,0.75")
    ap.add_argument("--count", type=int, default=128)
    ap.add_argument("--out-dir", type=Path, default=Path("geodesics"))
    args = ap.parse_args(argv)

    seeds = [float(t) for t in args.frame.split(",")]
    frame = frame_from_seed(seeds[:4], seeds[4:])
    args.out_dir.mkdir(parents=True, exist_ok=True)

    print("p,max_bloch_radius,min_Q0,file")
    for prob in (float(t) for t in args.probs.split(",")):
        samples = sample_geodesic(frame, prob, args.count)
        path = args.out_dir / f"geodesic_p{prob:.3f}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            w.writerows(sample_rows(samples))
        q = np.array([s.deformed.mu for s in samples])
        radius = np.linalg.norm(q[:, 1:], axis=1).max()
        print(f"{prob:.3f},{radius:.6f},{q[:, 0].min():.6f},{path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
