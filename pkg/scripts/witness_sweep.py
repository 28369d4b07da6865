"""Sweep the non-TP witness search over several resources and grid sizes."""

import argparse

from cspace.resource import aklt, cluster_1d, random_resource
from cspace.theorem import find_nontp_witness, make_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grids", default="2x4,4x8,8x16")
    ap.add_argument("--random", type=int, default=5, help="number of random qutrit resources")
    args = ap.parse_args()

    resources = {"aklt": aklt(), "cluster": cluster_1d()}
    for seed in range(args.random):
        resources[f"random3x2[{seed}]"] = random_resource(3, 2, 1.0, 1.5708, seed)

    print(f"{'resource':<16} {'grid':<6} {'step':<7} {'params':<10} {'theta':>7} {'phi':>7} {'out':>3} {'violation':>10}")
    for grid in args.grids.split(","):
        thetas, phis = make_grid(*(int(x) for x in grid.split("x")))
        for name, mps in resources.items():
            w = find_nontp_witness(mps, thetas, phis)
            if w is None:
                print(f"{name:<16} {grid:<6} {'-':<7}")
                continue
            print(
                f"{name:<16} {grid:<6} {w.proof_step:<7} {str(w.params):<10} "
                f"{w.basis.theta:7.4f} {w.basis.phi:7.4f} {w.outcome:3d} {w.violation:10.4g}"
            )


if __name__ == "__main__":
    main()
