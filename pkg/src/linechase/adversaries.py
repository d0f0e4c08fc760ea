"""Adaptive lower-bound adversaries.

Two families live here:

* the three-line construction that forces any deterministic policy to pay
  at least 1.5358 times the offline optimum (``arbitrary_lb_adversary``), and
* the constructions against memoryless rts-oblivious policies, whose ratio
  approaches sqrt(4 b^2 + 1/b^2 + 5) for drift ratio b (``memoryless_*``).

Each run yields an ``AdversaryTranscript``: the lines issued, both paths and
both costs.  The adversary's path is always a straight segment from the
start to a point that lies on every later line; it visits the earlier lines
where the segment crosses them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional

import numpy as np

from .core import Instance, OnlineRun, Policy, path_cost, ratio
from .errors import InvalidInput
from .geometry import Line, distance, intersect_lines_2d, on_line

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
X_AXIS = Line(np.zeros(2), np.array([1.0, 0.0]))


@dataclass(frozen=True)
class ArbitraryLBConstants:
    c1: float = 0.5535
    c2: float = 0.4965
    c3: float = 0.8743
    a1: float = 1.3012
    a2: float = 0.6663
    p2: float = 0.5612
    p3: float = 0.1696

    def __post_init__(self):
        for k, v in self.__dict__.items():
            if not v > 0:
                raise InvalidInput(f"{k} must be positive")


@dataclass
class ForceConfig:
    """How to force a policy onto a point: up to ``k`` lines through it.

    ``schedule="golden"`` uses angles pi * frac(j / phi), which never repeat
    and equidistribute.  ``schedule="fan"`` alternates between the line
    through the policy's current point and that line turned by ``fan_angle``.
    """

    k: int = 500
    stop_radius: float = 1e-4
    schedule: str = "golden"
    fan_angle: float = 0.1

    def __post_init__(self):
        if self.k < 1 or not self.stop_radius > 0:
            raise InvalidInput("need k >= 1 and stop_radius > 0")
        if self.schedule not in ("golden", "fan"):
            raise InvalidInput(f"unknown schedule {self.schedule!r}")


@dataclass
class AdversaryTranscript:
    start: np.ndarray
    lines: List[Line]
    alg_points: List[np.ndarray]
    adversary_points: List[np.ndarray]
    alg_cost: float
    adv_cost: float
    ratio: float
    branch: str
    initial_line: Optional[Line] = None
    notes: List[str] = field(default_factory=list)

    def summary(self) -> str:
        s = (f"branch={self.branch} alg_cost={self.alg_cost:.9g} "
             f"adv_cost={self.adv_cost:.9g} ratio={self.ratio:.9g}")
        if self.notes:
            s += " notes=" + ",".join(self.notes)
        return s


def _straight_visits(start, target, lines: List[Line]) -> List[np.ndarray]:
    """Where the segment start -> target meets each line (target if it lies on it)."""
    seg = None if np.allclose(start, target) else Line.through(start, target)
    visits = []
    for line in lines:
        if seg is None or on_line(target, line, 1e-10):
            visits.append(np.array(target, dtype=np.float64))
            continue
        q = intersect_lines_2d(seg, line)
        if q is None:
            raise InvalidInput("adversary segment misses a request line")
        visits.append(q)
    return visits


def _transcript(run: OnlineRun, target, branch, notes=()) -> AdversaryTranscript:
    start = run.points[0]
    adv = _straight_visits(start, target, run.lines)
    alg_cost = run.path().cost
    adv_cost = path_cost([start] + adv)
    return AdversaryTranscript(start, list(run.lines), run.points[1:], adv, alg_cost,
                               adv_cost, ratio(alg_cost, adv_cost), branch,
                               notes=list(notes))


# forcing -------------------------------------------------------------------

def force_angles(cfg: ForceConfig, anchor_angle: float = 0.0) -> Iterator[float]:
    for j in range(1, cfg.k + 1):
        if cfg.schedule == "golden":
            yield math.pi * ((j * INV_PHI) % 1.0)
        else:
            yield anchor_angle + (cfg.fan_angle if j % 2 == 0 else 0.0)


def force_to_point(run: OnlineRun, target, cfg: ForceConfig):
    """Issue lines through ``target`` until the policy is within ``stop_radius``.

    Returns ``(lines, points, complete)`` for the forcing phase alone.
    """
    target = np.asarray(target, dtype=np.float64)
    w = run.current - target
    anchor = math.atan2(w[1], w[0]) if np.any(w) else 0.0
    lines, points = [], []
    complete = False
    for theta in force_angles(cfg, anchor):
        line = Line(target, np.array([math.cos(theta), math.sin(theta)]))
        points.append(run.request(line))
        lines.append(line)
        if distance(points[-1], target) <= cfg.stop_radius:
            complete = True
            break
    return lines, points, complete


# three-line construction ---------------------------------------------------

@dataclass(frozen=True)
class Section5Geometry:
    """Points and lines of the three-line construction (unmirrored frame)."""

    P0: np.ndarray
    P1: np.ndarray
    C2: np.ndarray
    C3: np.ndarray
    A3: np.ndarray
    L1: Line
    L2: Line
    L3: Line
    P2: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    P3: np.ndarray
    P2_prime: np.ndarray


def section5_geometry(k: ArbitraryLBConstants = ArbitraryLBConstants()) -> Section5Geometry:
    P0 = np.array([0.0, 0.0])
    P1 = np.array([0.0, k.c1])
    C2 = np.array([0.0, k.c1 + k.c2])
    C3 = np.array([0.0, k.c1 + k.c2 + k.c3])
    A3 = np.array([1.0, k.c1])
    L1, L2, L3 = Line.through(P1, A3), Line.through(C2, A3), Line.through(C3, A3)

    def left_of_A3(line, dist):
        # the point of ``line`` whose projection on L1 is ``dist`` left of A3
        return A3 + (dist / line.dir[0]) * -line.dir

    P2 = left_of_A3(L2, k.p2)
    P3 = left_of_A3(L3, k.p3)
    P2_prime = intersect_lines_2d(Line.through(P1, P2), L3)
    return Section5Geometry(P0, P1, C2, C3, A3, L1, L2, L3, P2,
                            left_of_A3(L2, k.a1), left_of_A3(L3, k.a2), P3, P2_prime)


SECTION5_REFERENCE_VALUES = {
    "opt_force_A1": 1.23679,
    "alg_force_A1": 1.89948,
    "opt_force_A3": 1.142963,
    "alg_force_A3": 1.75537,
    "opt_force_A2": 1.50435,
    "alg_force_A2": 2.31039,
}
SECTION5_RATIO = 1.5358


def section5_bounds(k: ArbitraryLBConstants = ArbitraryLBConstants()) -> Dict[str, float]:
    """The six cost bounds of the construction, from point coordinates alone."""
    g = section5_geometry(k)
    d = distance
    head = d(g.P0, g.P1) + d(g.P1, g.P2)
    return {
        "opt_force_A1": d(g.P0, g.A1),
        "alg_force_A1": head + d(g.A3, g.A1) - d(g.A3, g.P2),
        "opt_force_A3": d(g.P0, g.A3),
        "alg_force_A3": head + d(g.P2, g.P3) + d(g.P3, g.A3),
        "opt_force_A2": d(g.P0, g.A2),
        "alg_force_A2": head + d(g.P2, g.P3) + d(g.A2, g.A3) - d(g.P3, g.A3),
    }


def section5_ratios(bounds: Dict[str, float]) -> Dict[str, float]:
    return {b: bounds[f"alg_force_{b}"] / bounds[f"opt_force_{b}"] for b in ("A1", "A3", "A2")}


BRANCH_TARGETS = {"force-A1": ("A1", 2), "force-A3": ("A3", 3), "force-A2": ("A2", 3)}


def section5_branch_instance(branch: str, constants: ArbitraryLBConstants = ArbitraryLBConstants(),
                             k: int = 50):
    """The request sequence of one branch with ``k`` golden-angle lines through its target.

    Returns ``(instance, target)``; the optimum is the straight move to the target.
    """
    if branch not in BRANCH_TARGETS:
        raise InvalidInput(f"unknown branch {branch!r}")
    g = section5_geometry(constants)
    name, n_lines = BRANCH_TARGETS[branch]
    target = getattr(g, name)
    lines = [g.L1, g.L2, g.L3][:n_lines]
    for theta in force_angles(ForceConfig(k=k)):
        lines.append(Line(target, np.array([math.cos(theta), math.sin(theta)])))
    return Instance(g.P0, lines), target


def arbitrary_lb_adversary(policy: Policy,
                           constants: ArbitraryLBConstants = ArbitraryLBConstants(),
                           force_cfg: Optional[ForceConfig] = None) -> AdversaryTranscript:
    """Play the three-line construction against ``policy`` starting at the origin."""
    force_cfg = force_cfg or ForceConfig()
    g = section5_geometry(constants)
    run = OnlineRun(policy, g.P0)
    q1 = run.request(g.L1)
    # play the mirror image when the policy leaned toward A3, so any lean is away from it
    mirrored = q1[0] > 0.0
    flip = np.array([-1.0, 1.0]) if mirrored else np.ones(2)

    def issue(line):
        return run.request(Line(line.base * flip, line.dir * flip)) * flip

    q2 = issue(g.L2)
    if q2[0] > g.P2[0]:
        target, branch = g.A1, "force-A1"
    else:
        q3 = issue(g.L3)
        if q3[0] <= g.P3[0]:
            target, branch = g.A3, "force-A3"
        else:
            target, branch = g.A2, "force-A2"
    _, _, complete = force_to_point(run, target * flip, force_cfg)
    notes = []
    if mirrored:
        notes.append("mirrored")
    if not complete:
        notes.append("force-incomplete")
    return _transcript(run, target * flip, branch, notes)


# memoryless constructions --------------------------------------------------

def theoretical_memoryless_ratio(b0: float) -> float:
    if not b0 > 0:
        raise InvalidInput("b0 must be positive")
    return math.sqrt(4.0 * b0 * b0 + 1.0 / (b0 * b0) + 5.0)


def memoryless_s2(beta_hat: float) -> float:
    return beta_hat + 1.0 / (2.0 * beta_hat)


def _rotated(center, angle) -> Line:
    return Line(center, np.array([math.cos(angle), math.sin(angle)]))


def memoryless_lb_sequence_main(a: float, m: int, observed_p1: float) -> Iterator[Line]:
    """Lines L_2..L_m after the policy answered L_1 = x-axis at (observed_p1, 0).

    They turn clockwise by arctan(a) per step around
    S_2 = (p1 + sqrt(1 + a^2) * (b + 1/(2b)), 0), where b = 1/a - p1 is the
    drift the policy showed on its first move.
    """
    if not a > 0 or m < 2:
        raise InvalidInput("need a > 0 and m >= 2")
    b = 1.0 / a - observed_p1
    S2 = np.array([observed_p1 + math.sqrt(1.0 + a * a) * memoryless_s2(b), 0.0])
    phi = math.atan(a)
    for t in range(2, m + 1):
        yield _rotated(S2, -(t - 1) * phi)


def memoryless_main_adversary(policy: Policy, a: float, m: int) -> AdversaryTranscript:
    """Adaptive construction against a memoryless policy with 0 < drift < 1/a.

    Starts at (1/a, 1) on y = a x and requests the x-axis; the policy's answer
    reveals its drift ratio b.  If b <= 0 the sequence continues as the
    rotation construction around the origin, and if b * a >= 1 (overshooting
    the intersection) it stops right there.
    """
    if not a > 0 or m < 2:
        raise InvalidInput("need a > 0 and m >= 2")
    P0 = np.array([1.0 / a, 1.0])
    L0 = Line(np.zeros(2), np.array([1.0, a]))
    run = OnlineRun(policy, P0, L0)
    q1 = run.request(X_AXIS)
    b = 1.0 / a - q1[0]
    if b <= 0:
        phi = math.atan(a)
        for t in range(2, m + 1):
            run.request(_rotated(np.zeros(2), -(t - 1) * phi))
        tr = _transcript(run, np.zeros(2), "memoryless-rotation", [f"beta_hat={b:.6g}"])
    elif b * a >= 1:
        tr = _transcript(run, np.array([1.0 / a, 0.0]), "memoryless-single", [f"beta_hat={b:.6g}"])
    else:
        for line in memoryless_lb_sequence_main(a, m, q1[0]):
            run.request(line)
        tr = _transcript(run, run.lines[-1].base, "memoryless-main", [f"beta_hat={b:.9g}"])
    tr.initial_line = L0
    return tr


def memoryless_lb_sequence_rotation(a: float, m: int) -> Instance:
    """Start (1, 0) on the x-axis; each line turns clockwise by arctan(a) around the origin."""
    if not 0 < a < 1:
        raise InvalidInput("need 0 < a < 1")
    phi = math.atan(a)
    return Instance(np.array([1.0, 0.0]), [_rotated(np.zeros(2), -t * phi) for t in range(1, m + 1)],
                    X_AXIS)


def memoryless_lb_single_step(h: float) -> Instance:
    if not h > 0:
        raise InvalidInput("need h > 0")
    return Instance(np.array([1.0, h]), [X_AXIS], Line(np.zeros(2), np.array([1.0, h])))


def _play_instance(policy, instance, target, branch):
    run = OnlineRun(policy, instance.start, instance.initial_line)
    for line in instance.requests:
        run.request(line)
    tr = _transcript(run, target, branch)
    tr.initial_line = instance.initial_line
    return tr


def memoryless_rotation_adversary(policy: Policy, a: float, m: int) -> AdversaryTranscript:
    return _play_instance(policy, memoryless_lb_sequence_rotation(a, m), np.zeros(2),
                          "memoryless-rotation")


def memoryless_single_adversary(policy: Policy, h: float) -> AdversaryTranscript:
    return _play_instance(policy, memoryless_lb_single_step(h), np.array([1.0, 0.0]),
                          "memoryless-single")
