"""Table of the AKLT sector (1,0) Gram decomposition for the F1 error."""

import argparse

import numpy as np

from cspace.channels import f1_error
from cspace.mixing import classify_sector, counterexample_decomposition, global_gram, sector_map


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rmax", type=int, default=7)
    ap.add_argument("--theta", type=float, default=np.pi / 2)
    ap.add_argument("--phi", type=float, default=np.pi / 2)
    args = ap.parse_args()

    ch = f1_error(args.theta, args.phi)
    print(f"{'r':>2} {'|S|':>5} {'proj':>7} {'coeff':>10} {'dev':>9} {'verdict':>11} {'global TP dev':>14}")
    for r in range(1, args.rmax + 1):
        sm = sector_map(ch, args.theta, args.phi, r, 1, 0)
        c, dev = counterexample_decomposition(sm)
        verdict = classify_sector(sm).verdict.value
        glob = np.max(np.abs(global_gram(ch, args.theta, args.phi, r) - np.eye(2)))
        proj = "|1><1|" if r % 2 else "|0><0|"
        coeff = "n/a" if c is None else f"{c:.6g}"
        print(f"{r:2d} {sm.n_success:5d} {proj:>7} {coeff:>10} {dev:9.2e} {verdict:>11} {glob:14.2e}")


if __name__ == "__main__":
    main()
