"""Contraction mapping principle and a constructive implicit function solver.

The implicit equation F(x, y) = 0 is solved near a known zero (x0, y0) with
F_y(x0, y0) != 0 by iterating the fixed-point map

    K(y; x) = y - F(x, y) / F_y(x0, y0),

after certifying on a sampled box that K is a contraction mapping the
interval I = [y0 - eps, y0 + eps] into itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (CannotCertify, DegenerateFy, EscapesInterval,
                     MaxIterExceeded, NotContraction)

FY_DEGENERACY = 1e-12
_CERT_GRID = 64
_MAX_HALVINGS = 40
_LIPSCHITZ_SAMPLES = 65


@dataclass(frozen=True)
class SolverConfig:
    epsilon: Optional[float] = None   # half-width of the y-interval; None = scale-aware default
    delta: Optional[float] = None     # half-width of the x-interval
    rho: float = 0.5                  # contraction constant target
    tol: float = 1e-12                # fixed-point residual
    max_iter: int = 200

    def __post_init__(self):
        if not (0.0 < self.rho < 1.0):
            raise ValueError("rho must lie in (0, 1)")
        if self.tol <= 0 or self.max_iter < 1:
            raise ValueError("tol must be positive and max_iter >= 1")
        if self.epsilon is not None and self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.delta is not None and self.delta <= 0:
            raise ValueError("delta must be positive")


@dataclass
class IterationTrace:
    iterates: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    converged: bool = False


@dataclass(frozen=True)
class Implicit2D:
    """A two-variable function with partial derivatives.

    All three callables must accept scalars and numpy arrays alike.
    """

    value: Callable
    dx: Callable
    dy: Callable


def fixed_point(K, interval, rho, tol=1e-12, max_iter=200, y_start=None):
    """Iterate y_{n+1} = K(y_n) on the closed interval to the unique fixed point.

    Contractivity is pre-checked by a sampled Lipschitz estimate.  The stopping
    rule |y_{n+1} - y_n| <= tol * (1 - rho) / rho certifies |y_n - y*| <= tol
    via the geometric Cauchy bound.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not lo < hi:
        raise ValueError("empty interval")
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")

    ys = np.linspace(lo, hi, _LIPSCHITZ_SAMPLES)
    kv = np.array([float(K(y)) for y in ys])
    h = ys[1] - ys[0]
    lip = float(np.max(np.abs(np.diff(kv)))) / h
    if lip >= 1.0:
        raise NotContraction(f"sampled Lipschitz estimate {lip:.6g} >= 1")

    slack = 1e-12 * max(1.0, abs(lo), abs(hi))
    y = 0.5 * (lo + hi) if y_start is None else float(y_start)
    trace = IterationTrace(iterates=[y])
    threshold = tol * (1.0 - rho) / rho
    for _ in range(max_iter):
        y_next = float(K(y))
        if y_next < lo - slack or y_next > hi + slack:
            raise EscapesInterval(f"iterate {y_next!r} left [{lo!r}, {hi!r}]")
        r = abs(y_next - y)
        trace.iterates.append(y_next)
        trace.residuals.append(r)
        y = y_next
        if r <= threshold:
            trace.converged = True
            return y, trace
    raise MaxIterExceeded(f"no convergence in {max_iter} iterations")


def apriori_iteration_bound(y0, y1, rho, tol):
    """Iteration count guaranteed by the geometric Cauchy bound."""
    d = abs(y1 - y0)
    if d == 0:
        return 1
    return max(1, math.ceil(math.log(tol * (1.0 - rho) / d) / math.log(rho)) + 1)


def _fy_scale(F, x0, y0):
    return max(1.0, abs(float(F.dx(x0, y0))))


def build_k(F: Implicit2D, x0, y0):
    """The fixed-point map K(y; x) = y - F(x, y) / F_y(x0, y0)."""
    fy0 = float(F.dy(x0, y0))
    if abs(fy0) <= FY_DEGENERACY * _fy_scale(F, x0, y0):
        raise DegenerateFy(f"F_y({x0!r}, {y0!r}) = {fy0!r} is degenerate")

    def K(y, x):
        return y - F.value(x, y) / fy0

    return K


def certify_neighborhood(F: Implicit2D, x0, y0, config: SolverConfig = None):
    """Find (epsilon, delta) on which K demonstrably contracts into I.

    Sampled checks on a grid of the box |x-x0| <= delta, |y-y0| <= epsilon:
      |1 - F_y(x, y)/F_y(x0, y0)| <= 1/2   (contraction of K)
      |K(y0; x) - y0| <= epsilon/2          (K maps I into I)
    Box half-widths are halved until both hold.
    """
    config = config or SolverConfig()
    fy0 = float(F.dy(x0, y0))
    if abs(fy0) <= FY_DEGENERACY * _fy_scale(F, x0, y0):
        raise DegenerateFy(f"F_y({x0!r}, {y0!r}) = {fy0!r} is degenerate")

    default = 0.1 * max(1.0, abs(y0))
    eps = config.epsilon if config.epsilon is not None else default
    delta = config.delta if config.delta is not None else default

    for _ in range(_MAX_HALVINGS):
        xs = np.linspace(x0 - delta, x0 + delta, _CERT_GRID)
        ys = np.linspace(y0 - eps, y0 + eps, _CERT_GRID)
        X, Y = np.meshgrid(xs, ys)
        ok_contract = bool(np.all(np.abs(1.0 - F.dy(X, Y) / fy0) <= 0.5))
        k_at_y0 = y0 - F.value(xs, np.full_like(xs, y0)) / fy0
        contain_slack = 1e-12 * max(1.0, abs(y0))
        ok_contain = bool(np.all(np.abs(k_at_y0 - y0) <= 0.5 * eps + contain_slack))
        if ok_contract and ok_contain:
            return eps, delta
        if not ok_contract:
            eps *= 0.5
            delta *= 0.5
        else:
            delta *= 0.5
    raise CannotCertify("no contraction neighborhood after 40 halvings")


def implicit_solve(F: Implicit2D, x0, y0, x, config: SolverConfig = None):
    """Solve F(x, y) = 0 for y, continuing from the known zero (x0, y0).

    If x lies beyond the certified delta, the solver walks toward x in
    certified steps, re-centering the fixed-point map at each stage.
    """
    config = config or SolverConfig()
    cur_x, cur_y = float(x0), float(y0)
    x = float(x)
    for _ in range(256):
        remaining = abs(x - cur_x)
        guess = max(0.1 * max(1.0, abs(cur_y)), 1.05 * remaining)
        stage_cfg = SolverConfig(
            epsilon=config.epsilon if config.epsilon is not None else guess,
            delta=config.delta if config.delta is not None else guess,
            rho=config.rho, tol=config.tol, max_iter=config.max_iter)
        eps, delta = certify_neighborhood(F, cur_x, cur_y, stage_cfg)
        if remaining <= delta:
            x_next = x
        else:
            x_next = cur_x + math.copysign(0.9 * delta, x - cur_x)
        K = build_k(F, cur_x, cur_y)
        cur_y, _ = fixed_point(lambda y: K(y, x_next),
                               (cur_y - eps, cur_y + eps),
                               config.rho, config.tol, config.max_iter,
                               y_start=cur_y)
        cur_x = x_next
        if cur_x == x:
            return cur_y
    raise CannotCertify("could not walk the implicit solution to the target x")


def implicit_derivative(F: Implicit2D, x, y):
    """Y'(x) = -F_x(x, y) / F_y(x, y) at a point with F(x, y) ~ 0."""
    fx = float(F.dx(x, y))
    fy = float(F.dy(x, y))
    if abs(fy) <= FY_DEGENERACY * max(1.0, abs(fx)):
        raise DegenerateFy(f"F_y({x!r}, {y!r}) = {fy!r} is degenerate")
    return -fx / fy
