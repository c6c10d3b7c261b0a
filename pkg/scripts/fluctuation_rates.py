"""Scaling of the largest-eigenvalue spread with N.

At a regular edge the spread decays like N^(-2/3); for a supercritical
outlier like N^(-1/2). Prints the rows and fitted log-log slopes for the
additive model with sigma = 1.

    python3 scripts/fluctuation_rates.py --sizes 250 500 1000 --trials 100
"""

import argparse

from freedeform import simlab as L
from freedeform.measures import dirac
from freedeform.models import DeformedModel


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[250, 500, 1000])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--theta", type=float, default=2.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    model = DeformedModel.additive(dirac(0.0), 1.0)
    cases = {
        "regular edge": [],
        f"outlier theta={args.theta:g}": [(args.theta, 1)],
    }
    for name, spikes in cases.items():
        specs = [L.ensemble_for(model, n, spikes, seed=args.seed)[0] for n in args.sizes]
        rows, slope = L.fluctuation_scan(specs, args.trials)
        print(f"\n{name}")
        for n, mean, std in rows:
            print(f"  N={n:5d}  mean l1 {mean:.4f}  std {std:.5f}")
        print(f"  slope {slope:.3f}")


if __name__ == "__main__":
    main()
