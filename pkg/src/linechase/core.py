"""Instances, paths and the loop that feeds requests to an online policy.

A policy is any callable ``policy(current, previous_line, new_line) -> point``
where ``previous_line`` is None on the very first request of an instance
without an initial line.  That triple is the whole memory a memoryless
policy gets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import ContractViolation, InvalidInput
from .geometry import (DirectSimilarity, Line, apply_similarity_line, as_point,
                       on_line, point_line_distance)

Policy = Callable[[np.ndarray, Optional[Line], Line], np.ndarray]

PATH_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Instance:
    start: np.ndarray
    requests: List[Line] = field(default_factory=list)
    initial_line: Optional[Line] = None

    def __post_init__(self):
        start = as_point(self.start)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "requests", list(self.requests))
        d = start.shape[0]
        for i, line in enumerate(self.requests):
            if line.dim != d:
                raise InvalidInput(f"request {i} has dimension {line.dim}, expected {d}")
        if self.initial_line is not None:
            if self.initial_line.dim != d:
                raise InvalidInput("initial line dimension does not match start")
            if not on_line(start, self.initial_line):
                raise InvalidInput("start does not lie on the initial line")

    @property
    def dim(self) -> int:
        return self.start.shape[0]

    def __len__(self):
        return len(self.requests)

    def transformed(self, f: DirectSimilarity) -> "Instance":
        init = None if self.initial_line is None else apply_similarity_line(f, self.initial_line)
        return Instance(f(self.start), [apply_similarity_line(f, l) for l in self.requests], init)

    def diameter(self) -> float:
        """Spread of the start point and the line base points; a scale for tolerances."""
        pts = np.vstack([self.start] + [l.base for l in self.requests])
        return float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))


@dataclass(frozen=True, eq=False)
class Path:
    points: List[np.ndarray]
    cost: float

    @classmethod
    def from_points(cls, points) -> "Path":
        pts = [np.asarray(p, dtype=np.float64) for p in points]
        return cls(pts, path_cost(pts))

    def step_costs(self) -> List[float]:
        return [math.dist(a, b) for a, b in zip(self.points, self.points[1:])]

    def check_feasible(self, instance: Instance, tol: float = PATH_TOL) -> None:
        if len(self.points) != len(instance.requests) + 1:
            raise InvalidInput("path length does not match the instance")
        if not np.array_equal(self.points[0], instance.start):
            raise InvalidInput("path does not begin at the start point")
        for t, (p, line) in enumerate(zip(self.points[1:], instance.requests), start=1):
            if point_line_distance(p, line) > tol * (1.0 + float(np.linalg.norm(p))):
                raise InvalidInput(f"point {t} is not on request line {t}")


@dataclass
class PolicyState:
    current: np.ndarray
    previous_line: Optional[Line] = None


def path_cost(points: Sequence) -> float:
    if len(points) == 0:
        raise InvalidInput("path needs at least one point")
    try:
        arr = np.asarray(points, dtype=np.float64)
    except ValueError:
        raise InvalidInput("points must share one dimension") from None
    if arr.ndim != 2:
        raise InvalidInput("points must share one dimension")
    return float(np.sum(np.linalg.norm(np.diff(arr, axis=0), axis=1)))


class OnlineRun:
    """Feeds requests to a policy one at a time, checking each answer."""

    def __init__(self, policy: Policy, start, initial_line: Optional[Line] = None,
                 tol: float = PATH_TOL):
        self.policy = policy
        self.state = PolicyState(as_point(start), initial_line)
        self.points = [self.state.current]
        self.lines: List[Line] = []
        self.tol = tol

    def request(self, line: Line) -> np.ndarray:
        t = len(self.lines) + 1
        p = np.asarray(self.policy(self.state.current, self.state.previous_line, line),
                       dtype=np.float64)
        if p.shape != self.points[0].shape or not np.all(np.isfinite(p)):
            raise ContractViolation(t, f"policy returned malformed point {p!r}")
        off = point_line_distance(p, line)
        if off > self.tol * (1.0 + float(np.linalg.norm(p))):
            raise ContractViolation(t, f"policy point is {off:.3g} away from the request line")
        self.points.append(p)
        self.lines.append(line)
        self.state = PolicyState(p, line)
        return p

    @property
    def current(self) -> np.ndarray:
        return self.state.current

    def path(self) -> Path:
        return Path.from_points(self.points)


def run_policy(policy: Policy, instance: Instance, tol: float = PATH_TOL) -> Path:
    run = OnlineRun(policy, instance.start, instance.initial_line, tol)
    for line in instance.requests:
        run.request(line)
    return run.path()


def ratio(alg_cost: float, opt_cost: float) -> float:
    if opt_cost > 0:
        return alg_cost / opt_cost
    return 1.0 if alg_cost == 0 else math.inf


def competitive_ratio(policy: Policy, instance: Instance, opt_cost: float) -> float:
    return ratio(run_policy(policy, instance).cost, opt_cost)


def random_line(rng: np.random.Generator, dim: int, spread: float = 1.0) -> Line:
    return Line(rng.uniform(-spread, spread, dim), rng.standard_normal(dim))


def random_instance(rng: np.random.Generator, m: int, dim: int = 2,
                    spread: float = 1.0, initial_line: bool = False) -> Instance:
    """Start and line base points uniform in a cube, directions isotropic."""
    start = rng.uniform(-spread, spread, dim)
    init = Line(start, rng.standard_normal(dim)) if initial_line else None
    return Instance(start, [random_line(rng, dim, spread) for _ in range(m)], init)
