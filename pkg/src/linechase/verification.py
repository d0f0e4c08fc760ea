"""Executable checks of DRIFT's analysis.

* ``check_potential_step`` / ``fuzz_potential``: the amortized step bound
  d(P,P') + sqrt(3) (d(A',P') - d(A,P)) <= 3 d(A,A') with potential
  sqrt(3) d(A,P).
* ``check_rts_oblivious``: a policy commutes with direct similarities.
* ``ratio_audit``: online cost against the offline solver.
* ``check_telescoping``: the per-step bounds summed along a whole run.

The fuzzer works in a normalized frame (new line = x-axis, intersection at
the origin), which loses nothing because every quantity involved is
invariant under rigid motions and scales linearly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .core import Instance, path_cost, ratio, run_policy
from .errors import InvalidInput
from .geometry import DirectSimilarity, Line, distance, on_line
from .offline import SolverConfig, solve_offline
from .policies import BetaPolicy, drift, drift_step_2d, extended_drift_step

SQRT3 = math.sqrt(3.0)
SQRT2 = math.sqrt(2.0)
LOG_LO, LOG_HI = math.log(1e-6), math.log(1e6)
CASES = ("case1", "case2", "case3", "case4", "parallel", "free")


@dataclass(frozen=True)
class PotentialStepReport:
    lhs: float
    rhs: float
    slack: float
    config: dict

    def ok(self, rel_tol: float = 1e-9) -> bool:
        return self.slack >= -rel_tol * (1.0 + self.rhs)


def _step_sides(P, P_new, A, A_new):
    lhs = distance(P, P_new) + SQRT3 * (distance(A_new, P_new) - distance(A, P))
    rhs = 3.0 * distance(A, A_new)
    return lhs, rhs


def check_potential_step(P, L: Line, L_new: Line, A, A_new, policy=None,
                         tol: float = 1e-9) -> PotentialStepReport:
    """Evaluate the amortized bound for one move of ``policy`` (DRIFT by default)."""
    P, A, A_new = (np.asarray(v, dtype=np.float64) for v in (P, A, A_new))
    if any(v.shape != (2,) for v in (P, A, A_new)) or L.dim != 2 or L_new.dim != 2:
        raise InvalidInput("potential check is planar")
    if not (on_line(P, L, tol) and on_line(A, L, tol)):
        raise InvalidInput("P and A must lie on L")
    if not on_line(A_new, L_new, tol):
        raise InvalidInput("A_new must lie on L_new")
    P_new = drift_step_2d(P, L, L_new)[0] if policy is None else np.asarray(policy(P, L, L_new))
    lhs, rhs = _step_sides(P, P_new, A, A_new)
    config = {"P": P.tolist(), "L": {"point": L.base.tolist(), "dir": L.dir.tolist()},
              "L_new": {"point": L_new.base.tolist(), "dir": L_new.dir.tolist()},
              "A": A.tolist(), "A_new": A_new.tolist(), "P_new": P_new.tolist()}
    return PotentialStepReport(lhs, rhs, rhs - lhs, config)


def _drift_ratio(a):
    """Vectorized x/h of DRIFT for a = h/s."""
    return (1.0 - a / (1.0 + np.sqrt(1.0 + a * a))) / SQRT2


def _logu(rng, n):
    return np.exp(rng.uniform(LOG_LO, LOG_HI, n))


def _sample(rng, n, beta):
    """n normalized configurations; returns arrays of P, L dir, A, A_new, P_new and case labels."""
    case = rng.integers(0, len(CASES), n)
    r = _logu(rng, n)
    theta = rng.uniform(0.0, math.pi, n)
    # keep the lines from being numerically parallel; that regime has its own stratum
    theta = np.clip(theta, 1e-9, math.pi - 1e-9)
    c, sn = np.cos(theta), np.sin(theta)
    par = case == CASES.index("parallel")

    h = r * sn
    s = np.abs(r * c)
    # in the parallel stratum the previous line is y = h and P sits at x = r cos(theta)
    h[par] = r[par]
    pb = r * c
    sign = np.where(pb >= 0, 1.0, -1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = h * beta(np.where(s > 0, h / s, np.inf))
    x = np.where(s > 0, x, 0.0)
    p_new = sign * (s - x)
    p_new[par] = pb[par]

    # projection abar of A onto the x-axis, stratified by where it falls
    u = np.empty(n)  # position along the ray from S through P_bar
    p_rel = s - x
    k = case
    m1, m2, m3, m4 = (k == 0), (k == 1), (k == 2), (k == 3)
    u[m1] = -_logu(rng, m1.sum())
    u[m2] = p_rel[m2] * rng.uniform(0, 1, m2.sum())
    u[m3] = p_rel[m3] + (s[m3] - p_rel[m3]) * rng.uniform(0, 1, m3.sum())
    u[m4] = s[m4] + _logu(rng, m4.sum())
    free = (k == 4) | (k == 5)
    u[free] = rng.choice([-1.0, 1.0], free.sum()) * _logu(rng, free.sum())
    abar = sign * u

    P = np.stack([pb, h], axis=1)
    Ldir = np.stack([c, sn], axis=1)
    A = np.empty((n, 2))
    nonpar = ~par
    # A on the line through the origin with direction (c, sn) whose x equals abar
    A[nonpar, 0] = abar[nonpar]
    A[nonpar, 1] = abar[nonpar] * sn[nonpar] / c[nonpar]
    A[par, 0] = abar[par]
    A[par, 1] = h[par]
    Ldir[par] = (1.0, 0.0)

    # A' on the x-axis: a few exact special positions, otherwise log-uniform offsets
    mode = rng.integers(0, 6, n)
    z = abar + rng.choice([-1.0, 1.0], n) * _logu(rng, n)
    z = np.where(mode == 0, abar, z)
    z = np.where(mode == 1, p_new, z)
    g = np.abs(abar - p_new)
    z = np.where(mode == 2, abar - sign * g / SQRT2, z)
    z = np.where(mode == 3, abar + sign * g / SQRT2, z)
    A_new = np.stack([z, np.zeros(n)], axis=1)
    P_new = np.stack([p_new, np.zeros(n)], axis=1)
    return P, Ldir, A, A_new, P_new, case


def _norm(v):
    return np.sqrt(np.einsum("ij,ij->i", v, v))


def fuzz_potential(n: int, seed: int = 0, beta: Optional[Callable] = None,
                   chunk: int = 200_000) -> PotentialStepReport:
    """Sample ``n`` steps and return the one with the smallest relative slack.

    ``beta`` is a vectorized drift ratio x/h as a function of h/s; the default
    is DRIFT's.  Pass ``lambda a: 0 * a`` for greedy.  Chunk ``i`` uses its
    own seed, so results do not depend on the chunk layout beyond ``chunk``.
    """
    if n < 1:
        raise InvalidInput("n must be >= 1")
    beta = beta or _drift_ratio
    worst = None
    done = 0
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(math.ceil(n / chunk))):
        size = min(chunk, n - done)
        done += size
        P, Ldir, A, A_new, P_new, case = _sample(np.random.default_rng(child), size, beta)
        lhs = _norm(P - P_new) + SQRT3 * (_norm(A_new - P_new) - _norm(A - P))
        rhs = 3.0 * _norm(A - A_new)
        score = (rhs - lhs) / (1.0 + rhs)
        j = int(np.argmin(score))
        if worst is None or score[j] < worst[0]:
            par = CASES[case[j]] == "parallel"
            L = Line(P[j], Ldir[j])
            cfg = {"P": P[j].tolist(), "L": {"point": P[j].tolist(), "dir": L.dir.tolist()},
                   "L_new": {"point": [0.0, 0.0], "dir": [1.0, 0.0]},
                   "A": A[j].tolist(), "A_new": A_new[j].tolist(), "P_new": P_new[j].tolist(),
                   "case": CASES[case[j]], "parallel": bool(par), "seed": seed, "chunk": i}
            worst = (score[j], PotentialStepReport(float(lhs[j]), float(rhs[j]),
                                                   float(rhs[j] - lhs[j]), cfg))
    return worst[1]


def replay(report: PotentialStepReport, policy=None) -> PotentialStepReport:
    """Recompute a fuzzed configuration through the scalar policy code."""
    c = report.config
    L = Line(c["L"]["point"], c["L"]["dir"])
    L_new = Line(c["L_new"]["point"], c["L_new"]["dir"])
    return check_potential_step(c["P"], L, L_new, c["A"], c["A_new"], policy)


def near_tight_family(theta: float, h: float = 1.0) -> PotentialStepReport:
    """A step whose slack is O(theta) relative to its right-hand side.

    The algorithm and adversary share the point P on a line at angle ``theta``
    to the new line; the adversary then moves to the new line at distance
    h/sqrt(2) beyond the projection of P, on the far side from the intersection.
    """
    if not 0 < theta < math.pi / 2:
        raise InvalidInput("theta must be in (0, pi/2)")
    s = h / math.tan(theta)
    P = np.array([s, h])
    L = Line(np.zeros(2), P)
    L_new = Line(np.zeros(2), np.array([1.0, 0.0]))
    return check_potential_step(P, L, L_new, P, np.array([s + h / SQRT2, 0.0]))


def check_rts_oblivious(policy, instance: Instance, f: DirectSimilarity) -> float:
    """max_t |f(P_t) - P_t^f| / (1 + scale(f) * diameter)."""
    a = run_policy(policy, instance).points
    b = run_policy(policy, instance.transformed(f)).points
    denom = 1.0 + f.scale * instance.diameter()
    return max(distance(f(p), q) for p, q in zip(a, b)) / denom


@dataclass(frozen=True)
class AuditResult:
    alg_cost: float
    opt_cost: float
    ratio: float
    certified: bool
    certificate_residual: float


def ratio_audit(policy, instance: Instance, cfg: Optional[SolverConfig] = None) -> AuditResult:
    cfg = cfg or SolverConfig()
    alg = run_policy(policy, instance).cost
    opt = solve_offline(instance, cfg)
    certified = opt.converged and opt.certificate_residual <= cfg.certificate_tol
    return AuditResult(alg, opt.cost, ratio(alg, opt.cost), certified, opt.certificate_residual)


def check_telescoping(instance: Instance, adversary_points: Sequence, policy=drift) -> float:
    """Slack of alg <= 3 adv + Phi_0 - Phi_m, summed from per-step bounds.

    ``adversary_points`` starts with A_0 (on the initial line, or the start
    point) and lists one point per request.  Returns
    3 adv + Phi_0 - Phi_m - alg, which the analysis says is >= 0 for DRIFT.
    """
    pts = [np.asarray(p, dtype=np.float64) for p in adversary_points]
    if len(pts) != len(instance) + 1:
        raise InvalidInput("need one adversary point per request plus the start")
    for p, line in zip(pts[1:], instance.requests):
        if not on_line(p, line, 1e-9):
            raise InvalidInput("adversary point off its request line")
    alg = run_policy(policy, instance)
    phi0 = SQRT3 * distance(alg.points[0], pts[0])
    phim = SQRT3 * distance(alg.points[-1], pts[-1])
    return 3.0 * path_cost(pts) + phi0 - phim - alg.cost


def coplanar_reduction_deviation(n: int, seed: int = 0, dim: int = 5) -> float:
    """Largest gap between ExtendedDRIFT on embedded planar steps and planar DRIFT.

    Each sample draws a planar step, embeds it isometrically into R^dim by a
    random orthonormal 2-frame plus offset, and compares the two moves.
    """
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        P = rng.uniform(-1, 1, 2)
        L = Line(P, rng.standard_normal(2))
        L_new = Line(rng.uniform(-1, 1, 2), rng.standard_normal(2))
        q, _ = np.linalg.qr(rng.standard_normal((dim, 2)))
        off = rng.uniform(-1, 1, dim)
        emb = lambda v: off + q @ v
        L3 = Line(emb(L.base), q @ L.dir)
        Ln3 = Line(emb(L_new.base), q @ L_new.dir)
        p2 = drift_step_2d(P, L, L_new)[0]
        pd = extended_drift_step(emb(P), L3, Ln3)
        worst = max(worst, distance(emb(p2), pd) / (1.0 + float(np.abs(p2).max())))
    return worst


def vectorized_beta(policy) -> Optional[Callable]:
    """Drift ratio usable by ``fuzz_potential`` for a named-policy object."""
    if policy is drift or getattr(policy, "name", None) in ("drift", "extended-drift", "beta:drift"):
        return None
    if getattr(policy, "name", None) == "greedy":
        return lambda a: np.zeros_like(a)
    if isinstance(policy, BetaPolicy) and policy.beta_ccw is None:
        return np.vectorize(policy.beta, otypes=[float])
    raise InvalidInput(f"no vectorized drift ratio for {policy!r}")
