"""Observed convergence order of the Fubini-Study and Bures expansions
as a function of sample count.

    python3 scripts/convergence_ladder.py --counts 100,1000,10000
"""

import argparse
import json
import sys

from qgeo.verify import SampleConfig, check_bures_expansion, check_fubini_relation


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--counts", default="100,1000")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)

    for n in (int(t) for t in args.counts.split(",")):
        cfg = SampleConfig(seed=args.seed, count=n)
        for check in (check_fubini_relation, check_bures_expansion):
            rep = check(cfg, workers=args.workers)
            row = {"check": rep.check_name, "count": n, "violations": rep.violations, **rep.details}
            print(json.dumps(row))
    return 0


if __name__ == "__main__":
    sys.exit(main())
