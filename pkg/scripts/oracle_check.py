"""Compare dense-simulation tomography with the analytic induced maps."""

import argparse

import numpy as np

from cspace.channels import random_cptp
from cspace.correlation import MeasurementBasis, induced_kraus, mixed_map
from cspace.oracle import choi_distance, reconstruct_induced_map
from cspace.resource import random_resource


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=25)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    dists = []
    for i in range(args.trials):
        seed = int(rng.integers(2**31))
        d, D = 2 + i % 2, 2
        mps = random_resource(d, D, float(rng.uniform(0.2, 2.9)), float(rng.uniform(0, 2 * np.pi)), seed)
        ch = random_cptp(d, 1 + i % 3, seed)
        basis = MeasurementBasis.random(d, seed)
        rec = reconstruct_induced_map(mps, ch, basis, n=args.n)
        dist = choi_distance(rec.superop, mixed_map(induced_kraus(mps, ch, basis)))
        dists.append(dist)
        print(f"trial {i:3d}  d={d}  rank={ch.rank}  cond={rec.condition_number:9.3g}  choi dist={dist:.2e}")
    print(f"max Choi distance {max(dists):.2e}")


if __name__ == "__main__":
    main()
