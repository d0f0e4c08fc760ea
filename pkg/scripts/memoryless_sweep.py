"""Adaptive memoryless construction against constant-beta policies for several rotation angles.

Prints CSV rows (beta, a, steps, simulated, theoretical, relative_gap).
"""

import argparse
import math
import sys

from linechase.adversaries import memoryless_main_adversary, theoretical_memoryless_ratio
from linechase.io import write_csv
from linechase.policies import constant_beta


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--betas", default=f"0.3,0.5,{1 / math.sqrt(2)},1,2")
    ap.add_argument("--as", dest="a_values", default="0.1,0.01,0.001")
    ap.add_argument("--turns", type=float, default=20.0,
                    help="steps per run are turns / a")
    args = ap.parse_args()

    rows = []
    for b in map(float, args.betas.split(",")):
        th = theoretical_memoryless_ratio(b)
        for a in map(float, args.a_values.split(",")):
            m = int(args.turns / a)
            r = memoryless_main_adversary(constant_beta(b), a, m).ratio
            rows.append([b, a, m, r, th, abs(r / th - 1)])
    write_csv(sys.stdout, ["beta", "a", "steps", "simulated", "theoretical", "relative_gap"], rows)


if __name__ == "__main__":
    main()
