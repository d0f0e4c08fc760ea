"""Online line-chasing policies: DRIFT, its R^d extension, greedy, and beta-policies.

Every policy here is memoryless: the next point depends only on the current
point, the previous request line and the new request line.  In the plane such
a move is fully described by the drift x along the new line, measured from
the projection P_bar of the current point toward the intersection S of the two
lines; ``StepGeometry`` records the quantities involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInput
from .geometry import (DEGENERACY_TOL, PARALLEL_TOL, Line, cross2,
                       intersect_params_2d, plane_through_line_and_point,
                       project_line_onto_plane, project_point_onto_line)

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class StepGeometry:
    intersecting: bool
    S: Optional[np.ndarray]
    r: float
    h: float
    s: float
    x: float
    p_bar: np.ndarray
    p_new: np.ndarray
    clockwise: Optional[bool] = None


def beta_of_drift(a: float) -> float:
    """Drift-to-height ratio x/h of DRIFT as a function of a = h/s.

    Equal to (a + 1 - sqrt(a^2 + 1)) / (sqrt(2) a), rearranged so that small
    ``a`` does not cancel.
    """
    if not a > 0:
        raise InvalidInput("beta is defined for a > 0")
    if math.isinf(a):
        return 0.0
    return (1.0 - a / (1.0 + math.sqrt(1.0 + a * a))) / SQRT2


def _drift_x(h, s, r, clockwise):
    # (h + s - r)/sqrt(2) with r - s = h^2/(r + s)
    return (h - h * h / (r + s)) / SQRT2


def _planar_step(P, L, L_new, drift_x, parallel_tol=PARALLEL_TOL, tol=DEGENERACY_TOL):
    b, d = L_new.base, L_new.dir
    w = P - b
    tp = float(w @ d)
    p_bar = b + tp * d
    h = math.hypot(*(w - tp * d))
    if h <= tol * (1.0 + math.hypot(*P)):
        return StepGeometry(False, None, 0.0, 0.0, 0.0, 0.0, P, P)
    params = None if L is None else intersect_params_2d(L_new, L, parallel_tol)
    if params is None:
        return StepGeometry(False, None, h, h, 0.0, 0.0, p_bar, p_bar)
    ts = params[0]
    S = L_new.point_at(ts)
    off = tp - ts
    s = abs(off)
    r = math.hypot(s, h)
    u, v = L.dir, d
    if u @ v < 0:
        v = -v
    clockwise = cross2(u, v) < 0
    if s == 0.0:
        return StepGeometry(True, S, r, h, s, 0.0, p_bar, S, clockwise)
    x = drift_x(h, s, r, clockwise)
    p_new = L_new.point_at(ts + (s - x if off > 0 else x - s))
    return StepGeometry(True, S, r, h, s, x, p_bar, p_new, clockwise)


def _require_2d(*pts):
    for p in pts:
        if p.shape[0] != 2:
            raise InvalidInput("planar step needs 2-dimensional input")


def drift_step_2d(P, L: Optional[Line], L_new: Line):
    """One DRIFT move in the plane; returns ``(P', StepGeometry)``.

    With no previous line, or a previous line parallel to the new one, DRIFT
    moves to the projection P_bar.  Otherwise it lands on the segment
    [S, P_bar] at distance s - x from S, x = (h + s - r)/sqrt(2).
    """
    P = np.asarray(P, dtype=np.float64)
    _require_2d(P, L_new.base)
    geo = _planar_step(P, L, L_new, _drift_x)
    return geo.p_new, geo


def greedy_step(P, L_new: Line) -> np.ndarray:
    P = np.asarray(P, dtype=np.float64)
    return project_point_onto_line(P, L_new)


def extended_drift_step(P, L: Optional[Line], L_new: Line) -> np.ndarray:
    """DRIFT inside the plane spanned by the new line and the current point.

    The previous line is projected orthogonally into that plane; if it
    collapses to a point (or is absent) the move is the plain projection.
    """
    P = np.asarray(P, dtype=np.float64)
    w = P - L_new.base
    tp = float(w @ L_new.dir)
    perp = w - tp * L_new.dir
    h = math.sqrt(float(perp @ perp))
    if h <= DEGENERACY_TOL * (1.0 + math.sqrt(float(P @ P))):
        return P
    U = plane_through_line_and_point(L_new, P)
    L_loc = None if L is None else project_line_onto_plane(L, U)
    if L_loc is None:
        return L_new.base + tp * L_new.dir
    new_loc = Line(np.zeros(2), np.array([1.0, 0.0]))
    geo = _planar_step(np.array([tp, h]), L_loc, new_loc, _drift_x)
    # the in-plane result lies on the x-axis, i.e. on L_new itself
    return L_new.base + geo.p_new[0] * L_new.dir


@dataclass(frozen=True, eq=False)
class BetaPolicy:
    """Memoryless planar policy with drift x = h * beta(h/s).

    ``beta`` governs clockwise rotations of the previous line into the new
    one, ``beta_ccw`` counter-clockwise ones.  Parallel lines always project.
    x < 0 moves away from S, x > s moves past it.
    """

    beta: Callable[[float], float]
    beta_ccw: Optional[Callable[[float], float]] = None
    name: str = "beta"

    def _x(self, h, s, r, clockwise):
        f = self.beta if clockwise or self.beta_ccw is None else self.beta_ccw
        return h * f(h / s)

    def step(self, P, L: Optional[Line], L_new: Line):
        P = np.asarray(P, dtype=np.float64)
        _require_2d(P, L_new.base)
        geo = _planar_step(P, L, L_new, self._x)
        return geo.p_new, geo

    def __call__(self, P, L, L_new):
        return self.step(P, L, L_new)[0]


def constant_beta(value: float) -> BetaPolicy:
    return BetaPolicy(lambda a: value, name=f"beta:const:{value:g}")


def memoryless_step(policy: BetaPolicy, P, L: Optional[Line], L_new: Line) -> np.ndarray:
    return policy(P, L, L_new)


def drift(P, L, L_new):
    return drift_step_2d(P, L, L_new)[0]


def extended_drift(P, L, L_new):
    return extended_drift_step(P, L, L_new)


def greedy(P, L, L_new):
    return greedy_step(P, L_new)


drift.name = "drift"
extended_drift.name = "extended-drift"
greedy.name = "greedy"

POLICY_NAMES = ("drift", "extended-drift", "greedy", "beta:const:<v>", "beta:drift")


def get_policy(name: str):
    """Look up a policy by its CLI name."""
    fixed = {"drift": drift, "extended-drift": extended_drift, "greedy": greedy}
    if name in fixed:
        return fixed[name]
    parts = name.split(":")
    if parts[0] == "beta":
        if parts[1:] == ["drift"]:
            return BetaPolicy(beta_of_drift, name="beta:drift")
        if len(parts) == 3 and parts[1] == "const":
            try:
                v = float(parts[2])
            except ValueError:
                pass
            else:
                if math.isfinite(v):
                    return BetaPolicy(lambda a: v, name=name)
    raise InvalidInput(f"unknown policy {name!r}; valid: {', '.join(POLICY_NAMES)}")


def policy_name(policy) -> str:
    return getattr(policy, "name", getattr(policy, "__name__", repr(policy)))
