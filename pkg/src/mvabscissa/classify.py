"""Local classification of solution points of the mean value condition.

A point is regular when f''(c0) != 0 (unique local branch c = C(b)).
Otherwise the orders of vanishing k, l of the split G = g1 - g2 reduce the
local zero set to the normal form u^l = +/- v^k, whose parity/sign case
analysis determines the branch structure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import expr, mvt
from .errors import DegenerateProblem, NotASolution, OutsideNeighborhood

NONZERO_REL_TOL = 1e-9
DEFAULT_KMAX = 16
SOLUTION_TOL = 1e-8
_EXTREMUM_GRID = 4096


class Case(str, Enum):
    REGULAR_C = "REGULAR_C"
    REGULAR_B_ONLY = "REGULAR_B_ONLY"
    TWO_BRANCHES = "TWO_BRANCHES"
    ISOLATED = "ISOLATED"
    ONE_SIDED = "ONE_SIDED"
    UNIQUE_ODD = "UNIQUE_ODD"
    DEGENERATE = "DEGENERATE"


@dataclass(frozen=True)
class DegeneracyReport:
    k: int            # order of vanishing of g2 at 0 (0 when none found)
    l: int            # order of vanishing of g1 at 0 (0 when none found)
    alpha0: float     # leading g1 coefficient
    beta0: float      # leading g2 coefficient
    sigma1: int
    sigma2: int
    case: Case
    f_pp_c0: float    # raw f''(c0), kept for auditing borderline calls
    f_b: float        # raw F_b(b0, c0)
    b_branch_exists: bool  # f'(b0) != f'(c0), so a local branch b = B(c) exists

    def to_dict(self):
        return {
            "k": self.k,
            "l": self.l,
            "alpha0": self.alpha0,
            "beta0": self.beta0,
            "sigma1": self.sigma1,
            "sigma2": self.sigma2,
            "case": self.case.value,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def classify_point(p: mvt.Problem, b0: float, c0: float,
                   kmax: int = DEFAULT_KMAX, tol: float = SOLUTION_TOL) -> DegeneracyReport:
    """Classify the solution point (b0, c0) of F(b, c) = 0."""
    value, f_b, f_c = (float(v) for v in mvt.big_f(p, b0, c0))
    jc = expr.jet_eval(p.f, c0, 2)
    scale = max(1.0, abs(float(jc.coeffs[1])), abs(value + float(jc.coeffs[1])))
    if abs(value) > tol * scale:
        raise NotASolution(f"|F({b0!r}, {c0!r})| = {abs(value)!r} exceeds tolerance")

    g1, g2 = mvt.g1_g2(p, b0, c0)
    s1 = g1.series(kmax)
    s2 = g2.series(kmax)
    l = expr.vanishing_order(s1, NONZERO_REL_TOL, start=1)
    k = expr.vanishing_order(s2, NONZERO_REL_TOL, start=1)
    alpha0 = float(s1[l]) if l is not None else 0.0
    beta0 = float(s2[k]) if k is not None else 0.0
    sigma1 = int(np.sign(alpha0))
    sigma2 = int(np.sign(beta0))
    f_pp_c0 = 2.0 * float(jc.coeffs[2])
    b_exists = l == 1

    if k == 1:
        case = Case.REGULAR_C
    elif k is None or l is None:
        case = Case.DEGENERATE
    elif k % 2 == 1:
        case = Case.UNIQUE_ODD
    elif l == 1:
        case = Case.REGULAR_B_ONLY
    elif l % 2 == 0:
        case = Case.TWO_BRANCHES if sigma1 * sigma2 > 0 else Case.ISOLATED
    else:
        case = Case.ONE_SIDED

    return DegeneracyReport(
        k=k or 0, l=l or 0, alpha0=alpha0, beta0=beta0,
        sigma1=sigma1, sigma2=sigma2, case=case,
        f_pp_c0=f_pp_c0, f_b=f_b, b_branch_exists=b_exists)


def _root(z, power):
    return z ** (1.0 / power)


class MorseChart:
    """Coordinates (u, v) in which g1(x) - g2(y) = sigma1*u^l - sigma2*v^k.

    u(x) = x * (sigma1 * g1(x) / x^l)^(1/l) and analogously v(y); valid on
    the window where the radicands stay positive.  Inverses are computed by
    numerical inversion (bisection on the monotone local chart).
    """

    _SERIES_CUTOFF = 1e-4

    def __init__(self, p, b0, c0, report, kmax=DEFAULT_KMAX):
        if report.case in (Case.REGULAR_C, Case.DEGENERATE):
            raise ValueError(f"no normal-form chart for case {report.case.value}")
        self.report = report
        self.g1, self.g2 = mvt.g1_g2(p, b0, c0)
        self._s1 = self.g1.series(min(expr.MAX_JET_ORDER, kmax + 8))
        self._s2 = self.g2.series(min(expr.MAX_JET_ORDER, kmax + 8))
        wx0 = 0.5 * min(b0 - p.a0, p.domain[1] - b0 if p.domain[1] > b0 else b0 - p.a0)
        wx0 = wx0 or 0.5 * (b0 - p.a0)
        wy0 = 0.5 * min(c0 - p.a0, b0 - c0)
        self.window_x = self._find_window(self._ratio1, report.sigma1, wx0)
        self.window_y = self._find_window(self._ratio2, report.sigma2, wy0)

    def _ratio(self, series, order, t):
        t = np.asarray(t, dtype=float)
        small = np.abs(t) < self._SERIES_CUTOFF
        # Horner on the shifted series where cancellation would bite
        tail = np.zeros_like(t)
        for coef in reversed(series[order:]):
            tail = tail * t + float(coef)
        g = self.g1(t) if series is self._s1 else self.g2(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            direct = np.asarray(g, dtype=float) / t ** order
        return np.where(small, tail, direct)

    def _ratio1(self, x):
        return self._ratio(self._s1, self.report.l, x)

    def _ratio2(self, y):
        return self._ratio(self._s2, self.report.k, y)

    def _find_window(self, ratio, sigma, w0):
        w = w0
        ts = np.linspace(-1.0, 1.0, 257)
        for _ in range(60):
            if np.all(sigma * ratio(ts * w) > 0):
                return w
            w *= 0.5
        raise OutsideNeighborhood("no window with positive radicand found")

    def u(self, x):
        r = self.report.sigma1 * self._ratio1(x)
        if np.any(r <= 0):
            raise OutsideNeighborhood("sigma1 * g1(x)/x^l is not positive here")
        return np.asarray(x, dtype=float) * _root(r, self.report.l)

    def v(self, y):
        r = self.report.sigma2 * self._ratio2(y)
        if np.any(r <= 0):
            raise OutsideNeighborhood("sigma2 * g2(y)/y^k is not positive here")
        return np.asarray(y, dtype=float) * _root(r, self.report.k)

    def _invert(self, fwd, window, target):
        lo, hi = -window, window
        flo, fhi = float(fwd(lo)), float(fwd(hi))
        if not min(flo, fhi) <= target <= max(flo, fhi):
            raise OutsideNeighborhood(f"target {target!r} outside the chart window")
        increasing = fhi >= flo
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = float(fwd(mid))
            if (fm < target) == increasing:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-16 * max(1.0, abs(lo), abs(hi)):
                break
        return 0.5 * (lo + hi)

    def x_of_u(self, u):
        return self._invert(self.u, self.window_x, float(u))

    def y_of_v(self, v):
        return self._invert(self.v, self.window_y, float(v))


def morse_coordinates(p: mvt.Problem, b0: float, c0: float,
                      report: DegeneracyReport, kmax: int = DEFAULT_KMAX) -> MorseChart:
    """Build the normal-form coordinate chart at a degenerate solution point."""
    return MorseChart(p, b0, c0, report, kmax)


def find_extremal_abscissa(p: mvt.Problem, kmax: int = DEFAULT_KMAX,
                           grid_n: int = _EXTREMUM_GRID):
    """Interior global extremum c0 of a normalized problem, with the odd
    order of vanishing k of f' at c0.

    Requires g(a0) = g(b0) = 0 (apply mvt.normalize first).
    """
    xs = np.linspace(p.a0, p.b0, grid_n + 1)
    gv = np.asarray(expr.evaluate(p.f, xs), dtype=float)
    scale = max(1.0, float(np.max(np.abs(gv))))
    if abs(gv[0]) > 1e-9 * scale or abs(gv[-1]) > 1e-9 * scale:
        raise ValueError("problem is not normalized: g(a0) or g(b0) is nonzero")
    if float(np.max(np.abs(gv))) <= 1e-12 * scale:
        raise DegenerateProblem("g vanishes identically on the grid")

    i_max = int(np.argmax(gv))
    i_min = int(np.argmin(gv))
    # global extremum = the larger of |max|, |min|; ties keep the smaller c0
    candidates = sorted([i_max, i_min], key=lambda i: (-abs(float(gv[i])), xs[i]))
    i0 = candidates[0]
    if i0 in (0, grid_n):
        i0 = candidates[1]
    if i0 in (0, grid_n):
        raise DegenerateProblem("no interior global extremum found")

    def gp(c):
        return float(expr.jet_eval(p.f, c, 1).coeffs[1])

    lo, hi = float(xs[max(0, i0 - 1)]), float(xs[min(grid_n, i0 + 1)])
    glo, ghi = gp(lo), gp(hi)
    if glo * ghi < 0:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            gm = gp(mid)
            if gm == 0.0:
                lo = hi = mid
                break
            if (gm > 0) == (glo > 0):
                lo, glo = mid, gm
            else:
                hi = mid
            if hi - lo <= 1e-16 * max(1.0, abs(lo), abs(hi)):
                break
        c0 = 0.5 * (lo + hi)
    else:
        # flat extremum: ternary search on the (negated) extremal value
        want_max = abs(float(gv[i_max])) >= abs(float(gv[i_min]))
        sgn = 1.0 if want_max else -1.0
        for _ in range(200):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            if sgn * float(expr.evaluate(p.f, m1)) < sgn * float(expr.evaluate(p.f, m2)):
                lo = m1
            else:
                hi = m2
            if hi - lo <= 1e-14 * max(1.0, abs(lo), abs(hi)):
                break
        c0 = 0.5 * (lo + hi)

    t = expr.jet_eval(p.f, c0, kmax + 1).coeffs
    deriv_series = tuple((j + 1) * t[j + 1] for j in range(kmax + 1))
    k = expr.vanishing_order(deriv_series, NONZERO_REL_TOL, start=1)
    if k is None:
        raise DegenerateProblem(f"f' vanishes to order > {kmax} at {c0!r}")
    return c0, k


def guaranteed_branch(p: mvt.Problem, b_range=None, step=None,
                      kmax: int = DEFAULT_KMAX, tol: float = mvt.DEFAULT_TOL):
    """The always-available continuous branch through an extremal abscissa.

    Normalizes the problem, picks the interior global extremum (odd order of
    vanishing of f'), and traces c = C(b) through (b0, c0).
    """
    from . import continuation

    pn = mvt.normalize(p)
    c0, k = find_extremal_abscissa(pn, kmax=kmax)
    w = p.b0 - p.a0
    if b_range is None:
        b_range = (max(p.a0 + 0.05 * w, p.b0 - 0.2 * w), p.b0 + 0.2 * w)
    pn = pn.covering(min(b_range[0], pn.domain[0]), max(b_range[1], pn.domain[1]))
    branch = continuation.trace_c_of_b(
        pn, p.b0, c0, b_range, step=step or 0.01 * w, tol=tol, kmax=kmax)
    return c0, branch
