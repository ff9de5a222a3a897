"""Branch tracing for the solution curves of F(b, c) = 0.

Euler predictor with slope -F_b/F_c, then a corrector: chord (contraction)
iteration while F_c is healthy, derivative-free bisection where the seed is
merely UNIQUE_ODD and F_c may vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import classify, mvt
from .errors import SeedNotRegular, SeedSearchFailed

DEGENERACY_THRESHOLD = 1e-7
NONZERO_B = 1e-9

STOP_RANGE = "range exhausted"
STOP_DEGENERATE = "degenerate F_c"
STOP_DOMAIN = "domain edge"
STOP_CORRECTOR = "corrector failure"


@dataclass
class Branch:
    points: list = field(default_factory=list)  # SolutionPoint, monotone parameter
    seed_index: int = 0
    stop_lower: str = STOP_RANGE
    stop_upper: str = STOP_RANGE
    seed_case: str = ""
    parameter: str = "b"  # "b" for c = C(b) branches, "c" for b = B(c)

    def to_dict(self):
        return {
            "parameter": self.parameter,
            "seed_index": self.seed_index,
            "seed_case": self.seed_case,
            "stop_lower": self.stop_lower,
            "stop_upper": self.stop_upper,
            "points": [{"b": q.b, "c": q.c, "residual": q.residual}
                       for q in self.points],
        }


def _chord_correct(p, b, c_pred, tol):
    """Re-centered contraction iteration for F(b, .) = 0 near c_pred."""
    m = float(mvt.big_f(p, b, c_pred)[2])
    scale = max(1.0, abs(float(mvt.big_f(p, b, c_pred)[1])))
    if abs(m) < DEGENERACY_THRESHOLD * scale:
        return None, STOP_DEGENERATE
    c = float(c_pred)
    leash = 1.0 + abs(c_pred)
    for _ in range(80):
        fv = float(mvt.big_f(p, b, c)[0])
        step = fv / m
        c -= step
        if not np.isfinite(c) or abs(c - c_pred) > leash:
            return None, STOP_CORRECTOR
        if abs(step) <= 1e-14 * max(1.0, abs(c)):
            break
    if abs(float(mvt.big_f(p, b, c)[0])) > tol:
        return None, STOP_CORRECTOR
    return c, None


def _bisect_correct(p, b, c_pred, window0, tol, lo_lim, hi_lim):
    """Derivative-free corrector: bracket a sign change of F(b, .) near c_pred."""

    def fval(c):
        return float(mvt.big_f(p, b, c)[0])

    w = max(window0, 1e-12)
    for _ in range(60):
        lo = max(lo_lim, c_pred - w)
        hi = min(hi_lim, c_pred + w)
        if hi <= lo:
            return None, STOP_DOMAIN
        grid = np.linspace(lo, hi, 65)
        fv = np.asarray(mvt.big_f(p, b, grid)[0], dtype=float)
        sc = np.nonzero(fv[:-1] * fv[1:] <= 0)[0]
        if sc.size:
            # bracket closest to the prediction
            mids = 0.5 * (grid[sc] + grid[sc + 1])
            i = int(sc[np.argmin(np.abs(mids - c_pred))])
            a, bb = float(grid[i]), float(grid[i + 1])
            fa = float(fv[i])
            for _ in range(200):
                mid = 0.5 * (a + bb)
                fm = fval(mid)
                if fm == 0.0:
                    a = bb = mid
                    break
                if (fm > 0) == (fa > 0):
                    a, fa = mid, fm
                else:
                    bb = mid
                if bb - a <= 1e-16 * max(1.0, abs(a), abs(bb)):
                    break
            c = 0.5 * (a + bb)
            if abs(fval(c)) > tol:
                return None, STOP_CORRECTOR
            return c, None
        if lo == lo_lim and hi == hi_lim:
            break
        w *= 2.0
    return None, STOP_CORRECTOR


def _march_c(p, b0, c0, direction, b_limit, step, tol, bisection):
    """Walk a c = C(b) branch from (b0, c0) toward b_limit."""
    points = []
    b, c = float(b0), float(c0)
    prev_dc = 0.0
    k = 0
    while True:
        remaining = (b_limit - b) * direction
        if remaining <= 1e-12 * max(1.0, abs(b_limit)):
            return points, STOP_RANGE
        tried_half = False
        h = min(step, remaining)
        while True:
            b_next = b + direction * h
            if not (p.domain[0] <= b_next <= p.domain[1]) or b_next <= p.a0:
                return points, STOP_DOMAIN
            value, f_b, f_c = (float(v) for v in mvt.big_f(p, b, c))
            scale = max(1.0, abs(f_b))
            if not bisection and abs(f_c) < DEGENERACY_THRESHOLD * scale:
                return points, STOP_DEGENERATE
            c_pred = c - f_b / f_c * (b_next - b) if not bisection else c
            if bisection:
                window0 = max(4.0 * abs(prev_dc), h, 1e-6 * (b0 - p.a0))
                c_new, why = _bisect_correct(p, b_next, c_pred, window0, tol,
                                             p.a0, b_next)
            else:
                c_new, why = _chord_correct(p, b_next, c_pred, tol)
            if c_new is not None and p.a0 < c_new < b_next:
                break
            if c_new is not None:
                return points, STOP_DOMAIN
            if why == STOP_DEGENERATE:
                return points, STOP_DEGENERATE
            if tried_half:
                return points, STOP_CORRECTOR
            tried_half = True
            h *= 0.5
        prev_dc = c_new - c
        b, c = b_next, c_new
        points.append(mvt.solution_point(p, b, c, tol))
        k += 1
        if k > 100000:
            return points, STOP_CORRECTOR


def trace_c_of_b(p: mvt.Problem, b0: float, c0: float, b_range, step=None,
                 tol: float = mvt.DEFAULT_TOL, kmax: int = classify.DEFAULT_KMAX) -> Branch:
    """Trace the branch c = C(b) through the seed (b0, c0) across b_range."""
    lo, hi = float(b_range[0]), float(b_range[1])
    if not (lo <= b0 <= hi):
        raise ValueError("seed b0 must lie inside b_range")
    p = p.covering(min(lo, p.domain[0]), max(hi, p.domain[1]))
    step = step or 0.01 * (b0 - p.a0)
    report = classify.classify_point(p, b0, c0, kmax=kmax)
    if report.case not in (classify.Case.REGULAR_C, classify.Case.UNIQUE_ODD):
        raise SeedNotRegular(
            f"seed classifies as {report.case.value}; no unique local C(b)")
    bisection = report.case == classify.Case.UNIQUE_ODD

    up, stop_upper = _march_c(p, b0, c0, +1, hi, step, tol, bisection)
    down, stop_lower = _march_c(p, b0, c0, -1, lo, step, tol, bisection)
    seed = mvt.solution_point(p, b0, c0, max(tol, classify.SOLUTION_TOL))
    points = list(reversed(down)) + [seed] + up
    return Branch(points=points, seed_index=len(down),
                  stop_lower=stop_lower, stop_upper=stop_upper,
                  seed_case=report.case.value, parameter="b")


def _march_b(p, b0, c0, direction, c_limit, step, tol):
    """Walk a b = B(c) branch from (b0, c0) toward c_limit."""
    points = []
    b, c = float(b0), float(c0)
    while True:
        remaining = (c_limit - c) * direction
        if remaining <= 1e-12 * max(1.0, abs(c_limit)):
            return points, STOP_RANGE
        tried_half = False
        h = min(step, remaining)
        while True:
            c_next = c + direction * h
            value, f_b, f_c = (float(v) for v in mvt.big_f(p, b, c))
            scale = max(1.0, abs(f_c))
            if abs(f_b) < DEGENERACY_THRESHOLD * scale:
                return points, STOP_DEGENERATE
            b_pred = b - f_c / f_b * (c_next - c)
            b_new, why = _chord_correct_b(p, c_next, b_pred, tol)
            if b_new is not None and p.a0 < c_next < b_new \
                    and p.domain[0] <= b_new <= p.domain[1]:
                break
            if b_new is not None:
                return points, STOP_DOMAIN
            if why == STOP_DEGENERATE:
                return points, STOP_DEGENERATE
            if tried_half:
                return points, STOP_CORRECTOR
            tried_half = True
            h *= 0.5
        b, c = b_new, c_next
        points.append(mvt.solution_point(p, b, c, tol))


def _chord_correct_b(p, c, b_pred, tol):
    m = float(mvt.big_f(p, b_pred, c)[1])
    scale = max(1.0, abs(float(mvt.big_f(p, b_pred, c)[2])))
    if abs(m) < DEGENERACY_THRESHOLD * scale:
        return None, STOP_DEGENERATE
    b = float(b_pred)
    leash = 1.0 + abs(b_pred)
    for _ in range(80):
        fv = float(mvt.big_f(p, b, c)[0])
        step = fv / m
        b -= step
        if not np.isfinite(b) or abs(b - b_pred) > leash:
            return None, STOP_CORRECTOR
        if abs(step) <= 1e-14 * max(1.0, abs(b)):
            break
    if abs(float(mvt.big_f(p, b, c)[0])) > tol:
        return None, STOP_CORRECTOR
    return b, None


def trace_b_of_c(p: mvt.Problem, b0: float, c0: float, c_range, step=None,
                 tol: float = mvt.DEFAULT_TOL, kmax: int = classify.DEFAULT_KMAX) -> Branch:
    """Trace the branch b = B(c) through the seed; needs f'(b0) != f'(c0)."""
    lo, hi = float(c_range[0]), float(c_range[1])
    if not (lo <= c0 <= hi):
        raise ValueError("seed c0 must lie inside c_range")
    step = step or 0.01 * (b0 - p.a0)
    value, f_b, f_c = (float(v) for v in mvt.big_f(p, b0, c0))
    if abs(f_b) <= NONZERO_B * max(1.0, abs(f_c), abs(value)):
        raise SeedNotRegular("f'(b0) = f'(c0) at the seed; B(c) is not guaranteed")

    up, stop_upper = _march_b(p, b0, c0, +1, hi, step, tol)
    down, stop_lower = _march_b(p, b0, c0, -1, lo, step, tol)
    seed = mvt.solution_point(p, b0, c0, max(tol, classify.SOLUTION_TOL))
    points = list(reversed(down)) + [seed] + up
    return Branch(points=points, seed_index=len(down),
                  stop_lower=stop_lower, stop_upper=stop_upper,
                  seed_case="", parameter="c")


def branch_seeds_after_degeneracy(p: mvt.Problem, b0: float, c0: float,
                                  report, step0=None, tol: float = mvt.DEFAULT_TOL):
    """Two validated (b, c) seeds just past a TWO_BRANCHES / ONE_SIDED point.

    Steps |b - b0| = step0 to the allowed side and brackets F(b, .) = 0 above
    and below c0 by bisection.
    """
    allowed = (classify.Case.TWO_BRANCHES, classify.Case.ONE_SIDED,
               classify.Case.REGULAR_B_ONLY)
    if report.case not in allowed:
        raise ValueError(f"case {report.case.value} has no nearby branch pair")
    side = 1 if report.case == classify.Case.TWO_BRANCHES \
        else (1 if report.sigma1 * report.sigma2 > 0 else -1)
    step0 = step0 or 0.01 * (b0 - p.a0)
    b = b0 + side * step0
    if not (p.a0 < b <= p.domain[1] and p.domain[0] <= b):
        raise SeedSearchFailed("stepped endpoint left the domain")

    def bracket(side_c):
        w = 0.25 * min(c0 - p.a0, abs(b - c0)) if b > c0 else 0.25 * (c0 - p.a0)
        for _ in range(30):
            lo = c0 + side_c * 1e-14 * max(1.0, abs(c0))
            hi = c0 + side_c * w
            grid = np.linspace(lo, hi, 513)
            grid = grid[(grid > p.a0) & (grid < b)]
            if grid.size < 2:
                return None
            fv = np.asarray(mvt.big_f(p, b, grid)[0], dtype=float)
            sc = np.nonzero(fv[:-1] * fv[1:] < 0)[0]
            if sc.size:
                i = int(sc[0])  # grid runs outward from c0: nearest bracket first
                a, bb = sorted((float(grid[i]), float(grid[i + 1])))
                fa = float(mvt.big_f(p, b, a)[0])
                for _ in range(200):
                    mid = 0.5 * (a + bb)
                    fm = float(mvt.big_f(p, b, mid)[0])
                    if fm == 0.0:
                        a = bb = mid
                        break
                    if (fm > 0) == (fa > 0):
                        a, fa = mid, fm
                    else:
                        bb = mid
                    if bb - a <= 1e-16 * max(1.0, abs(a), abs(bb)):
                        break
                return 0.5 * (a + bb)
            w *= 1.6
        return None

    lo_c = bracket(-1)
    hi_c = bracket(+1)
    if lo_c is None or hi_c is None:
        raise SeedSearchFailed("no bracketed roots above and below c0")
    for c in (lo_c, hi_c):
        mvt.solution_point(p, b, c, tol)  # validates residual + interiority
    return [(b, lo_c), (b, hi_c)]
