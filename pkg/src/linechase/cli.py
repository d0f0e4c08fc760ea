"""``line-chase`` command line.

Exit codes: 0 success, 1 a verification assertion failed, 2 usage or input
error, 3 a policy broke the online contract.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import sys
from typing import List, Optional

import numpy as np

from . import adversaries as adv
from .core import random_instance, run_policy
from .errors import ContractViolation, InvalidInput
from .geometry import DirectSimilarity
from .io import load_instance, write_csv
from .offline import SolverConfig, solve_offline
from .policies import POLICY_NAMES, constant_beta, get_policy
from . import verification as ver

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CONTRACT = 0, 1, 2, 3
ADVERSARY_KINDS = ("arbitrary", "memoryless-main", "memoryless-rotation", "memoryless-single")
SUITES = ("potential", "rts", "ratio-audit", "section5-constants")


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _path_rows(points):
    cum = 0.0
    prev = points[0]
    for t, p in enumerate(points):
        step = math.dist(prev, p)
        cum += step
        prev = p
        yield [t, *map(float, p), step, cum]


def _path_header(dim):
    return ["step", *[f"x{i}" for i in range(dim)], "step_cost", "cumulative_cost"]


def cmd_run(args) -> int:
    inst = load_instance(args.instance)
    path = run_policy(get_policy(args.policy), inst)
    if args.out:
        with _output(args.out) as fh:
            write_csv(fh, _path_header(inst.dim), _path_rows(path.points))
    print(f"total_cost={path.cost:.17g}")
    return EXIT_OK


def cmd_opt(args) -> int:
    inst = load_instance(args.instance)
    res = solve_offline(inst, SolverConfig(seed=args.seed))
    if args.out:
        with _output(args.out) as fh:
            write_csv(fh, _path_header(inst.dim), _path_rows(res.path.points))
    print(f"opt_cost={res.cost:.17g} converged={res.converged} "
          f"certificate_residual={res.certificate_residual:.3g}")
    return EXIT_OK


def _run_adversary(kind, policy, args):
    if kind == "arbitrary":
        cfg = adv.ForceConfig(k=args.force_lines, stop_radius=args.stop_radius)
        return adv.arbitrary_lb_adversary(policy, adv.ArbitraryLBConstants(), cfg)
    if kind == "memoryless-main":
        return adv.memoryless_main_adversary(policy, args.a, args.steps)
    if kind == "memoryless-rotation":
        return adv.memoryless_rotation_adversary(policy, args.a, args.steps)
    return adv.memoryless_single_adversary(policy, args.h)


def cmd_adversary(args) -> int:
    tr = _run_adversary(args.kind, get_policy(args.policy), args)
    if args.out:
        header = ["step", "line_x", "line_y", "dir_x", "dir_y", "alg_x", "alg_y", "adv_x", "adv_y"]
        rows = ([t + 1, *map(float, l.base), *map(float, l.dir), *map(float, p), *map(float, q)]
                for t, (l, p, q) in enumerate(zip(tr.lines, tr.alg_points, tr.adversary_points)))
        with _output(args.out) as fh:
            write_csv(fh, header, rows)
    print(tr.summary())
    return EXIT_OK


def cmd_sweep(args) -> int:
    rows = []
    for b in args.beta_grid:
        tr = adv.memoryless_main_adversary(constant_beta(b), args.a, args.steps)
        th = adv.theoretical_memoryless_ratio(b)
        rows.append([b, tr.ratio, th, abs(tr.ratio - th)])
    with _output(args.out) as fh:
        write_csv(fh, ["beta", "simulated_ratio", "theoretical_ratio", "gap"], rows)
    return EXIT_OK


def _fail(name: str, detail: dict) -> int:
    print(f"FAIL {name}")
    print(json.dumps(detail, indent=1, default=float))
    return EXIT_FAIL


def _verify_potential(args) -> int:
    policy = get_policy(args.policy)
    beta = ver.vectorized_beta(policy)
    worst = ver.fuzz_potential(args.n, args.seed, beta=beta)
    print(f"potential: n={args.n} policy={args.policy} min_slack={worst.slack:.6g} "
          f"rhs={worst.rhs:.6g} case={worst.config['case']}")
    if not worst.ok():
        return _fail("potential", {"lhs": worst.lhs, "rhs": worst.rhs, "slack": worst.slack,
                                   "config": worst.config})
    return EXIT_OK


def _verify_rts(args) -> int:
    rng = np.random.default_rng(args.seed)
    names = [args.policy] if args.policy_given else ["drift", "extended-drift", "greedy",
                                                     "beta:drift", "beta:const:0.3"]
    worst = (0.0, None)
    for i in range(args.n):
        inst = random_instance(rng, 20, 2)
        f = DirectSimilarity.random(rng, 2)
        for name in names:
            dev = ver.check_rts_oblivious(get_policy(name), inst, f)
            if dev > worst[0]:
                worst = (dev, {"instance": i, "policy": name, "seed": args.seed})
    print(f"rts: n={args.n} max_deviation={worst[0]:.3g}")
    if worst[0] > 1e-9:
        return _fail("rts", {"deviation": worst[0], **worst[1]})
    return EXIT_OK


def _verify_ratio(args) -> int:
    rng = np.random.default_rng(args.seed)
    name = args.policy if args.policy_given else ("drift" if args.dim == 2 else "extended-drift")
    policy = get_policy(name)
    worst, bad = 0.0, None
    uncertified = 0
    for i in range(args.n):
        inst = random_instance(rng, args.lines, args.dim)
        res = ver.ratio_audit(policy, inst)
        uncertified += not res.certified
        if res.ratio > worst:
            worst = res.ratio
            if res.ratio > 3.0 + 1e-6:
                bad = {"instance": i, "alg_cost": res.alg_cost, "opt_cost": res.opt_cost,
                       "ratio": res.ratio, "seed": args.seed, "dim": args.dim}
    print(f"ratio-audit: policy={name} dim={args.dim} n={args.n} max_ratio={worst:.9g} "
          f"uncertified={uncertified}")
    return _fail("ratio-audit", bad) if bad else EXIT_OK


def _verify_section5(args) -> int:
    bounds = adv.section5_bounds()
    ok = True
    for key, val in bounds.items():
        ref = adv.SECTION5_REFERENCE_VALUES[key]
        good = abs(val - ref) <= 1e-4
        ok &= good
        print(f"{key:14s} computed={val:.7f} reference={ref} {'ok' if good else 'MISMATCH'}")
    for branch, r in adv.section5_ratios(bounds).items():
        good = r >= adv.SECTION5_RATIO
        ok &= good
        print(f"ratio {branch:8s} {r:.7f} >= {adv.SECTION5_RATIO} {'ok' if good else 'FAIL'}")
    return EXIT_OK if ok else _fail("section5-constants", bounds)


def cmd_verify(args) -> int:
    return {"potential": _verify_potential, "rts": _verify_rts,
            "ratio-audit": _verify_ratio, "section5-constants": _verify_section5}[args.suite](args)


def _beta_grid(text: str) -> List[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")
    if not vals or any(not (v > 0 and math.isfinite(v)) for v in vals):
        raise argparse.ArgumentTypeError("beta values must be positive and finite")
    return vals


def _positive(kind):
    def parse(text):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive: {text}")
        return v
    return parse


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="line-chase", description="Online line chasing experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    def policy_opt(sp, default="drift"):
        sp.add_argument("--policy", default=None,
                        help=f"one of {', '.join(POLICY_NAMES)} (default {default})")
        sp.set_defaults(default_policy=default)

    r = sub.add_parser("run", help="run a policy on an instance file")
    r.add_argument("--instance", required=True)
    r.add_argument("--out")
    policy_opt(r)
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("opt", help="solve an instance offline")
    o.add_argument("--instance", required=True)
    o.add_argument("--out")
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_opt)

    a = sub.add_parser("adversary", help="play a lower-bound adversary against a policy")
    a.add_argument("kind", choices=ADVERSARY_KINDS)
    policy_opt(a)
    a.add_argument("--a", type=_positive(float), default=1e-3)
    a.add_argument("--h", type=_positive(float), default=0.01)
    a.add_argument("--steps", type=_positive(int), default=100_000)
    a.add_argument("--force-lines", type=_positive(int), default=500)
    a.add_argument("--stop-radius", type=_positive(float), default=1e-4)
    a.add_argument("--out")
    a.set_defaults(func=cmd_adversary)

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("--suite", required=True, choices=SUITES)
    v.add_argument("--n", type=_positive(int), default=None)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--dim", type=int, default=2)
    v.add_argument("--lines", type=_positive(int), default=50)
    policy_opt(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="memoryless construction against constant-beta policies")
    s.add_argument("--beta-grid", type=_beta_grid, required=True)
    s.add_argument("--a", type=_positive(float), default=1e-3)
    s.add_argument("--steps", type=_positive(int), default=100_000)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)
    return p


SUITE_DEFAULT_N = {"potential": 1_000_000, "rts": 1000, "ratio-audit": 1000, "section5-constants": 1}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "default_policy"):
        args.policy_given = args.policy is not None
        args.policy = args.policy or args.default_policy
        try:
            get_policy(args.policy)
        except InvalidInput as e:
            parser.error(str(e))
    if getattr(args, "suite", None) and args.n is None:
        args.n = SUITE_DEFAULT_N[args.suite]
    if getattr(args, "dim", 2) < 2:
        parser.error("--dim must be >= 2")
    try:
        return args.func(args)
    except ContractViolation as e:
        print(f"contract violation at step {e.step}: {e}", file=sys.stderr)
        return EXIT_CONTRACT
    except (InvalidInput, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
