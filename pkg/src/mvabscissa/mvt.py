"""The mean value condition as an implicit equation F(b, c) = 0.

F(b, c) = (f(b) - f(a0)) / (b - a0) - f'(c).  A zero of F is a pair of a
right endpoint b and a mean value abscissa c for f on [a0, b].
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import expr
from .errors import DegenerateProblem, DomainError, EndpointCollision
from .solver import Implicit2D

DEFAULT_TOL = 1e-10
DEFAULT_GRID_N = 2048


@dataclass(frozen=True)
class Problem:
    """A function together with fixed endpoints and an evaluation domain."""

    f: expr.ExprNode
    a0: float
    b0: float
    domain: Optional[tuple] = None

    def __post_init__(self):
        if not (np.isfinite(self.a0) and np.isfinite(self.b0) and self.a0 < self.b0):
            raise ValueError("need finite endpoints with a0 < b0")
        if self.domain is None:
            w = self.b0 - self.a0
            object.__setattr__(self, "domain", (self.a0 - w, self.b0 + w))
        lo, hi = self.domain
        if not (np.isfinite(lo) and np.isfinite(hi) and lo <= self.a0 and hi >= self.b0):
            raise ValueError("domain must be a finite interval containing [a0, b0]")
        # fail early if f is not evaluable on the domain
        expr.evaluate(self.f, np.linspace(lo, hi, 65))

    @property
    def expression(self) -> str:
        return expr.to_string(self.f)

    def covering(self, lo, hi) -> "Problem":
        """A copy whose domain is extended to cover [lo, hi] (re-validated)."""
        dlo, dhi = self.domain
        if lo >= dlo and hi <= dhi:
            return self
        return replace(self, domain=(min(lo, dlo), max(hi, dhi)))


@dataclass(frozen=True)
class SolutionPoint:
    b: float
    c: float
    residual: float


def solution_point(p: Problem, b, c, tol=DEFAULT_TOL) -> SolutionPoint:
    """Construct a validated solution point: interior c and residual <= tol."""
    b, c = float(b), float(c)
    if not (p.a0 < c < b):
        raise ValueError(f"abscissa c={c!r} is not interior to ({p.a0!r}, {b!r})")
    r = abs(float(big_f(p, b, c)[0]))
    if r > tol:
        raise ValueError(f"residual {r!r} exceeds tolerance {tol!r}")
    return SolutionPoint(b, c, r)


def _endpoint_guard(p, b):
    scale = max(1.0, abs(p.a0), float(np.max(np.abs(np.asarray(b, dtype=float)))))
    if np.any(np.abs(np.asarray(b, dtype=float) - p.a0) < 1e-12 * scale):
        raise EndpointCollision(f"b collides with a0 = {p.a0!r}")


def big_f(p: Problem, b, c):
    """F, F_b, F_c at (b, c); b and c may be scalars or numpy arrays."""
    _endpoint_guard(p, b)
    fa = expr.evaluate(p.f, p.a0)
    jb = expr.jet_eval(p.f, b, 1)
    jc = expr.jet_eval(p.f, c, 2)
    fb, fpb = jb.coeffs[0], jb.coeffs[1]
    fpc, fppc = jc.coeffs[1], 2.0 * jc.coeffs[2]
    d = b - p.a0
    value = (fb - fa) / d - fpc
    f_b = (fpb * d - (fb - fa)) / (d * d)
    f_c = -fppc
    return value, f_b, f_c


def mean_value_implicit(p: Problem) -> Implicit2D:
    """F(b, c) packaged for the implicit solver (x = b, y = c)."""

    def value(b, c):
        return big_f(p, b, c)[0]

    def dx(b, c):
        return big_f(p, b, c)[1]

    def dy(b, c):
        jc = expr.jet_eval(p.f, c, 2)
        return -2.0 * jc.coeffs[2] + 0.0 * np.asarray(b, dtype=float)

    return Implicit2D(value=value, dx=dx, dy=dy)


def normalize(p: Problem) -> Problem:
    """Subtract the secant line so g(a0) = g(b0) = 0; solutions are unchanged."""
    fa = float(expr.evaluate(p.f, p.a0))
    fb = float(expr.evaluate(p.f, p.b0))
    s = (fb - fa) / (p.b0 - p.a0)
    secant = expr.Binary(
        "+",
        expr.Binary("*", expr.Const(s),
                    expr.Binary("-", expr.Var(), expr.Const(p.a0))),
        expr.Const(fa))
    return replace(p, f=expr.Binary("-", p.f, secant))


def abscissae(p: Problem, b, tol=DEFAULT_TOL, grid_n=DEFAULT_GRID_N):
    """All mean value abscissae for f on [a0, b], sorted and deduplicated.

    Sign changes of F(b, .) on a uniform grid are refined by bisection;
    zero-touching double roots are recovered from local minima of |F|.
    """
    b = float(b)
    if not (p.a0 < b <= p.domain[1]):
        raise ValueError(f"b = {b!r} outside (a0, domain max]")
    if grid_n < 64:
        raise ValueError("grid_n must be >= 64")

    cs = np.linspace(p.a0, b, grid_n + 2)[1:-1]
    fv = np.asarray(big_f(p, b, cs)[0], dtype=float)

    fprime_scale = max(1.0, float(np.max(np.abs(
        expr.jet_eval(p.f, cs[:: max(1, grid_n // 64)], 1).coeffs[1]))))
    if float(np.max(np.abs(fv))) <= 1e-12 * fprime_scale:
        raise DegenerateProblem("F(b, .) vanishes identically on the grid")

    def f_of(c):
        return float(big_f(p, b, c)[0])

    roots = []
    width_tol = 1e-15 * (b - p.a0)
    # sign changes -> bisection
    for i in np.nonzero(fv[:-1] * fv[1:] < 0)[0]:
        lo, hi = float(cs[i]), float(cs[i + 1])
        flo = float(fv[i])
        while hi - lo > width_tol:
            mid = 0.5 * (lo + hi)
            fm = f_of(mid)
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm > 0) == (flo > 0):
                lo = mid
                flo = fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    # exact zeros on the grid
    for i in np.nonzero(fv == 0.0)[0]:
        roots.append(float(cs[i]))
    # touching double roots: local minima of |F| already below tol
    av = np.abs(fv)
    interior = np.arange(1, len(cs) - 1)
    mins = interior[(av[interior] <= av[interior - 1])
                    & (av[interior] <= av[interior + 1])
                    & (av[interior] <= tol)
                    & (fv[interior - 1] * fv[interior + 1] > 0)]
    for i in mins:
        lo, hi = float(cs[i - 1]), float(cs[i + 1])
        # ternary search on |F|
        while hi - lo > width_tol:
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if abs(f_of(m1)) <= abs(f_of(m2)):
                hi = m2
            else:
                lo = m1
        roots.append(0.5 * (lo + hi))

    # interiority, residual, dedup (radius (b-a0)/grid_n, smaller c wins)
    merge_r = (b - p.a0) / grid_n
    out = []
    for c in sorted(roots):
        if not (p.a0 < c < b):
            continue
        if abs(f_of(c)) > tol:
            continue
        if out and c - out[-1] < merge_r:
            continue
        out.append(c)
    return out


class LocalSeries:
    """A single-variable function of a local coordinate t, centered at t = 0.

    Callable for values (scalars or arrays) and exposes Taylor coefficients
    at 0 to any order up to the jet maximum.
    """

    def __init__(self, value_fn, series_fn):
        self._value = value_fn
        self._series = series_fn

    def __call__(self, t):
        return self._value(t)

    def series(self, order: int):
        return self._series(order)


def g1_g2(p: Problem, b0: float, c0: float):
    """Split G(x, y) = F(b0+x, c0+y) as g1(x) - g2(y), both zero at 0.

    g1(x) = (f(b0+x) - f(a0)) / ((b0+x) - a0) - f'(c0)
    g2(y) = f'(c0+y) - f'(c0)
    """
    fa = float(expr.evaluate(p.f, p.a0))
    fpc0 = float(expr.jet_eval(p.f, c0, 1).coeffs[1])

    def g1_value(x):
        bb = b0 + np.asarray(x, dtype=float)
        _endpoint_guard(p, bb)
        return (expr.evaluate(p.f, bb) - fa) / (bb - p.a0) - fpc0

    def g1_series(order):
        num = list(expr.jet_eval(p.f, b0, order).coeffs)
        num[0] = num[0] - fa
        den = [b0 - p.a0, 1.0] + [0.0] * (order - 1) if order >= 1 else [b0 - p.a0]
        q = expr._div(num, den)
        q[0] = q[0] - fpc0
        return tuple(q)

    def g2_value(y):
        cc = c0 + np.asarray(y, dtype=float)
        return expr.jet_eval(p.f, cc, 1).coeffs[1] - fpc0

    def g2_series(order):
        t = expr.jet_eval(p.f, c0, order + 1).coeffs
        d = [(j + 1) * t[j + 1] for j in range(order + 1)]
        d[0] = 0.0  # d[0] == fpc0 by construction
        return tuple(d)

    return LocalSeries(g1_value, g1_series), LocalSeries(g2_value, g2_series)
