"""Offline optimum for line chasing.

Minimizes sum_t |P_{t-1} - P_t| over P_t on line X_t.  With P_t = b_t + s_t d_t
the objective is convex in the scalar parameters s_1..s_m.

The solver runs block-coordinate descent, where each block is a single
point and has a closed-form minimizer (unfold the two neighbours across the
line).  Plain BCD stalls wherever two consecutive points sit on the
intersection of their lines: each one alone is then optimal.  So every
restart is first driven by Newton's method on the smoothed objective
sum_t sqrt(|P_{t-1} - P_t|^2 + eps^2) with eps shrinking to ~1e-12 of the
instance scale; its Hessian in s is tridiagonal.  BCD sweeps then finish
the job on the exact objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.linalg import solveh_banded

from .core import Instance, Path
from .errors import InvalidInput
from .geometry import Line

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class SolverConfig:
    tol: Optional[float] = None  # None: 1e-12 * (1 + initial objective)
    max_sweeps: int = 100_000
    restarts: int = 3
    certificate_tol: float = 1e-7
    seed: int = 0
    smoothing: bool = True

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise InvalidInput("tol must be positive")
        if not self.certificate_tol > 0:
            raise InvalidInput("certificate_tol must be positive")
        if self.max_sweeps < 1 or self.restarts < 1:
            raise InvalidInput("max_sweeps and restarts must be >= 1")


@dataclass
class OptResult:
    path: Path
    converged: bool
    sweeps_used: int
    certificate_residual: float
    history: List[float] = field(default_factory=list)
    restart_costs: List[float] = field(default_factory=list)

    @property
    def cost(self) -> float:
        return self.path.cost


def golden_section_search(f, lo: float, hi: float, tol: float) -> float:
    """Minimizer of a unimodal ``f`` on [lo, hi] to within ``tol``."""
    a, b = min(lo, hi), max(lo, hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = (a + b) / 2.0
    # the bracket ends are candidates too when the minimum is on a flat piece
    return min((a, x, b), key=f)


def _foot(line: Line, A):
    w = A - line.base
    t = float(w @ line.dir)
    return t, float(np.linalg.norm(w - t * line.dir))


def minimize_on_line(line: Line, A, B=None, method: str = "exact") -> np.ndarray:
    """argmin over Q on ``line`` of |A - Q| + |Q - B| (just |A - Q| without B).

    ``exact`` reflects B across the line and intersects segment A-B' with it;
    ``golden`` runs golden-section search on the line parameter over the
    bracket spanned by the two projections.
    """
    A = np.asarray(A, dtype=np.float64)
    a, ha = _foot(line, A)
    if B is None:
        return line.point_at(a)
    B = np.asarray(B, dtype=np.float64)
    b, hb = _foot(line, B)
    if method == "exact":
        if ha + hb == 0.0:
            return line.point_at(a)
        return line.point_at((a * hb + b * ha) / (ha + hb))
    if method == "golden":
        if a == b:
            return line.point_at(a)
        f = lambda t: math.hypot(t - a, ha) + math.hypot(t - b, hb)
        width = abs(b - a)
        return line.point_at(golden_section_search(f, a, b, 1e-12 * (1.0 + width)))
    raise InvalidInput(f"unknown method {method!r}")


def _coincide_tol(points: np.ndarray) -> float:
    return 1e-9 * (1.0 + float(np.max(np.abs(points))))


def _stationarity(pts: np.ndarray, D: np.ndarray, tol: float) -> float:
    E = np.diff(pts, axis=0)  # E[k] = P_{k+1} - P_k
    n = np.linalg.norm(E, axis=1)
    far = n > tol
    U = np.zeros_like(E)
    U[far] = E[far] / n[far, None]
    # unit vectors from P_t toward P_{t-1} and P_{t+1}
    back = -U
    fwd = np.vstack([U[1:], np.zeros((1, E.shape[1]))])
    # coincident neighbours contribute a zero vector; the subgradient test
    # |<u, dir>| <= 1 that replaces stationarity there is always satisfied
    both = far & np.append(far[1:], True)
    g = np.abs(np.einsum("ij,ij->i", back + fwd, D))
    return float(np.max(g[both], initial=0.0))


def check_first_order(path: Path, instance: Instance, tol: Optional[float] = None) -> float:
    """Largest first-order stationarity violation over the path's points.

    A point distinct from both neighbours needs the unit vectors toward them
    to sum to something orthogonal to its line (the last point has only one
    neighbour, so that vector itself must be orthogonal).  Where a point
    coincides with a neighbour, within ``tol``, the objective has a kink and
    the subgradient condition is checked instead.
    """
    path.check_feasible(instance)
    pts = np.asarray(path.points)
    if len(pts) == 1:
        return 0.0
    if tol is None:
        tol = _coincide_tol(pts)
    D = np.array([l.dir for l in instance.requests])
    return _stationarity(pts, D, tol)


class _Problem:
    """Vectorized view of an instance for the solver."""

    def __init__(self, instance: Instance):
        self.p0 = instance.start
        self.B = np.array([l.base for l in instance.requests])
        self.D = np.array([l.dir for l in instance.requests])
        self.m = len(instance.requests)
        self.DD = np.einsum("ij,ij->i", self.D[:-1], self.D[1:])

    def points(self, s):
        return self.B + s[:, None] * self.D

    def objective(self, s) -> float:
        P = self.points(s)
        E = np.diff(np.vstack([self.p0, P]), axis=0)
        return float(np.sum(np.sqrt(np.einsum("ij,ij->i", E, E))))

    def residual(self, s) -> float:
        pts = np.vstack([self.p0, self.points(s)])
        return _stationarity(pts, self.D, _coincide_tol(pts))

    def greedy(self) -> np.ndarray:
        s = np.empty(self.m)
        prev = self.p0
        for k in range(self.m):
            s[k] = (prev - self.B[k]) @ self.D[k]
            prev = self.B[k] + s[k] * self.D[k]
        return s

    # smoothed Newton ------------------------------------------------------

    def _smoothed(self, s, eps):
        P = self.points(s)
        E = np.empty_like(P)
        E[0] = P[0] - self.p0
        np.subtract(P[1:], P[:-1], out=E[1:])
        phi = np.sqrt(np.einsum("ij,ij->i", E, E) + eps * eps)
        return E, phi

    def smoothed_value(self, s, eps) -> float:
        return float(self._smoothed(s, eps)[1].sum())

    def newton(self, s, eps, stop, max_iter=100):
        """Minimize the eps-smoothed objective until the Newton decrement is below ``stop``."""
        m = self.m
        D = self.D
        ab = np.zeros((2, m))
        for _ in range(max_iter):
            E, phi = self._smoothed(s, eps)
            G = E / phi[:, None]
            # e_k = P_k - P_{k-1}: d e_k/d s_k = D_k, d e_{k+1}/d s_k = -D_k
            gd_own = np.einsum("ij,ij->i", G, D)
            grad = gd_own.copy()
            diag = (1.0 - gd_own * gd_own) / phi
            if m > 1:
                gd_next = np.einsum("ij,ij->i", G[1:], D[:-1])
                grad[:-1] -= gd_next
                diag[:-1] += (1.0 - gd_next * gd_next) / phi[1:]
                ab[0, 1:] = -(self.DD - gd_next * gd_own[1:]) / phi[1:]
            ab[1] = diag
            try:
                step = -solveh_banded(ab if m > 1 else ab[1:], grad, check_finite=False)
            except np.linalg.LinAlgError:
                break
            dec = -float(grad @ step)
            if not dec > stop:
                break
            f0 = float(phi.sum())
            alpha = 1.0
            while alpha > 1e-10:
                s_new = s + alpha * step
                if self.smoothed_value(s_new, eps) <= f0 - 0.25 * alpha * dec:
                    break
                alpha *= 0.5
            else:
                break
            s = s_new
        return s

    # block-coordinate descent ---------------------------------------------

    def half_sweep(self, s, parity):
        idx = np.arange(parity, self.m, 2)
        if idx.size == 0:
            return s
        P = self.points(s)
        prev = np.vstack([self.p0, P[:-1]])[idx]
        B, D = self.B[idx], self.D[idx]
        wa = prev - B
        a = np.einsum("ij,ij->i", wa, D)
        ha = np.linalg.norm(wa - a[:, None] * D, axis=1)
        new = a.copy()
        inner = idx < self.m - 1
        if np.any(inner):
            ii = idx[inner]
            wb = P[ii + 1] - B[inner]
            b = np.einsum("ij,ij->i", wb, D[inner])
            hb = np.linalg.norm(wb - b[:, None] * D[inner], axis=1)
            hsum = ha[inner] + hb
            safe = hsum > 0
            val = np.where(safe, (a[inner] * hb + b * ha[inner]) / np.where(safe, hsum, 1.0), a[inner])
            new[inner] = val
        out = s.copy()
        out[idx] = new
        return out

    def snap(self, s, radius):
        """Merge near-coincident consecutive points onto the closest points of their lines."""
        P = self.points(s)
        gaps = np.linalg.norm(np.diff(P, axis=0), axis=1)
        f = self.objective(s)
        for k in np.flatnonzero(gaps < radius):
            d1, d2 = self.D[k], self.D[k + 1]
            w = self.B[k + 1] - self.B[k]
            c = float(d1 @ d2)
            den = 1.0 - c * c
            if den <= 1e-24:
                continue
            e1, e2 = float(w @ d1), float(w @ d2)
            trial = s.copy()
            trial[k] = (e1 - c * e2) / den
            trial[k + 1] = (c * e1 - e2) / den
            ft = self.objective(trial)
            if ft < f:
                s, f = trial, ft
        return s


def _bcd(prob: _Problem, s, tol, max_sweeps, target):
    """Sweeps until the objective stalls; a few more if the residual is still above ``target``."""
    history = [prob.objective(s)]
    converged = False
    sweeps = 0
    extra = 0
    while sweeps < max_sweeps:
        s = prob.half_sweep(s, 0)
        s = prob.half_sweep(s, 1)
        sweeps += 1
        history.append(prob.objective(s))
        if history[-2] - history[-1] < tol:
            converged = True
            # objective changes are below float resolution here; judge by the gradient
            if extra >= 200 or prob.residual(s) <= target:
                break
            extra += 1
    return s, history, sweeps, converged


def solve_offline(instance: Instance, cfg: Optional[SolverConfig] = None) -> OptResult:
    cfg = cfg or SolverConfig()
    m = len(instance.requests)
    if m == 0:
        path = Path.from_points([instance.start])
        return OptResult(path, True, 0, 0.0, [0.0], [0.0])
    prob = _Problem(instance)
    rng = np.random.default_rng(cfg.seed)
    s0 = prob.greedy()
    scale = max(instance.diameter(), 1e-300)
    tol = cfg.tol if cfg.tol is not None else 1e-12 * (1.0 + prob.objective(s0))

    best = None
    restart_costs = []
    for r in range(cfg.restarts):
        s = s0 if r == 0 else s0 + rng.uniform(-scale, scale, m)
        target = 0.1 * cfg.certificate_tol
        if cfg.smoothing:
            eps = 1e-2 * scale
            while eps > 1e-11 * scale:
                s = prob.newton(s, eps, 0.1 * eps)
                eps *= 1e-2
            s = prob.newton(s, eps, 1e-24 * scale, max_iter=15)
            s = prob.snap(s, 1e-5 * (1.0 + scale))
        s, history, sweeps, converged = _bcd(prob, s, tol, cfg.max_sweeps, target)
        if cfg.smoothing and prob.residual(s) > target:
            # very short optimal edges need a smaller smoothing radius
            s_fine = prob.snap(prob.newton(s, 1e-14 * scale, 0.0, max_iter=30), 1e-5 * (1.0 + scale))
            s_fine, h2, sw2, converged = _bcd(prob, s_fine, tol, cfg.max_sweeps, target)
            if h2[-1] <= history[-1]:
                s = s_fine
                # keep one monotone trajectory: the polish run replaces a history it does not extend
                history = history + h2[1:] if h2[0] <= history[-1] else h2
                sweeps += sw2
        cost = history[-1]
        restart_costs.append(cost)
        if best is None or cost < best[0]:
            best = (cost, s, history, sweeps, converged)

    _, s, history, sweeps, converged = best
    path = Path.from_points([instance.start] + list(prob.points(s)))
    residual = check_first_order(path, instance)
    return OptResult(path, converged, sweeps,
                     residual, history, restart_costs)
