"""Competitive-ratio audit of DRIFT / ExtendedDRIFT on random instances in several dimensions."""

import argparse
import sys
import time

import numpy as np

from linechase.core import random_instance
from linechase.io import write_csv
from linechase.policies import get_policy
from linechase.verification import ratio_audit


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dims", default="2,3,5,8")
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--lines", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rows = []
    for dim in map(int, args.dims.split(",")):
        name = "drift" if dim == 2 else "extended-drift"
        policy = get_policy(name)
        rng = np.random.default_rng([args.seed, dim])
        t0 = time.perf_counter()
        res = [ratio_audit(policy, random_instance(rng, args.lines, dim)) for _ in range(args.n)]
        ratios = np.array([r.ratio for r in res])
        rows.append([dim, name, args.n, float(ratios.mean()), float(np.quantile(ratios, 0.99)),
                     float(ratios.max()), sum(not r.certified for r in res),
                     time.perf_counter() - t0])
    write_csv(sys.stdout, ["dim", "policy", "instances", "mean_ratio", "p99_ratio", "max_ratio",
                           "uncertified", "seconds"], rows)


if __name__ == "__main__":
    main()
