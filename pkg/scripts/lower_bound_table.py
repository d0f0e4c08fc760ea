"""Three-line construction: analytic cost bounds and adaptive runs against several policies."""

import argparse
import sys

from linechase import adversaries as adv
from linechase.io import write_csv
from linechase.policies import get_policy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--policies", default="drift,greedy,beta:drift,beta:const:0.3,beta:const:1.0")
    ap.add_argument("--force-lines", type=int, default=500)
    ap.add_argument("--stop-radius", type=float, default=1e-4)
    args = ap.parse_args()

    bounds = adv.section5_bounds()
    print("analytic bounds")
    for key, val in bounds.items():
        print(f"  {key:14s} {val:.7f}  (reference {adv.SECTION5_REFERENCE_VALUES[key]})")
    for branch, r in adv.section5_ratios(bounds).items():
        print(f"  ratio {branch}: {r:.7f}")

    cfg = adv.ForceConfig(k=args.force_lines, stop_radius=args.stop_radius)
    rows = []
    for name in args.policies.split(","):
        tr = adv.arbitrary_lb_adversary(get_policy(name), adv.ArbitraryLBConstants(), cfg)
        rows.append([name, tr.branch, tr.alg_cost, tr.adv_cost, tr.ratio, len(tr.lines),
                     ";".join(tr.notes)])
    print()
    write_csv(sys.stdout, ["policy", "branch", "alg_cost", "adv_cost", "ratio", "lines", "notes"], rows)


if __name__ == "__main__":
    main()
