"""Shared corpus problems and independent oracles for the test suite.

Expected values are produced by oracles that do not share code with the
library: closed forms, the quadratic formula, plain bisection, brute-force
grids, and finite differences.
"""

import math

import numpy as np
import pytest

import mvabscissa as mva

# f(x) = -x^2 + 2x on [0, 2]: the unique abscissa is c = b/2.
PARABOLA = "-x^2 + 2*x"

# f(x) = x^3 - 3x^2 + 2x, a0 = 0: abscissae solve 3c^2 - 6c = b^2 - 3b,
# i.e. c = 1 +/- sqrt(1 + (b^2 - 3b)/3).
CUBIC = "x^3 - 3*x^2 + 2*x"

# Quartic with an inflection abscissa on [0, 3]: at the seed (3, 1) the
# second derivative vanishes but f'(3) != f'(1).
QUARTIC_INFLECTION = "x^4 - (17/3)*x^3 + 11*x^2 - 9*x"

# Quintic with f' = (x-1)^2 (x-3) (x-1.4) on [0, 3]: seed (3, 1) has
# k = 2, l = 2 with matching leading signs (crossing branch pair).
QUINTIC_SAME_SIGN = "x^5/5 - 1.6*x^4 + (14/3)*x^3 - 6.4*x^2 + 4.2*x"

# Sextic with f' = (x-1)^2 (x-3) (x^2 - 4.5x + 3.3) on [0, 3]: seed (3, 1)
# has k = 2, l = 2 with opposite leading signs (isolated solution).
SEXTIC_OPPOSITE = "x^6/6 - 1.9*x^5 + 8.2*x^4 - 17*x^3 + 18.3*x^2 - 9.9*x"


@pytest.fixture
def parabola():
    return mva.Problem(mva.parse(PARABOLA), 0.0, 2.0)


@pytest.fixture
def cubic():
    return mva.Problem(mva.parse(CUBIC), 0.0, 3.0)


@pytest.fixture
def quartic_inflection():
    return mva.Problem(mva.parse(QUARTIC_INFLECTION), 0.0, 3.0)


@pytest.fixture
def quintic_same_sign():
    return mva.Problem(mva.parse(QUINTIC_SAME_SIGN), 0.0, 3.0)


@pytest.fixture
def sextic_opposite():
    return mva.Problem(mva.parse(SEXTIC_OPPOSITE), 0.0, 3.0)


@pytest.fixture
def x_fourth():
    return mva.Problem(mva.parse("x^4"), -1.0, 1.0)


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def cubic_lower(b):
    return 1.0 - math.sqrt(1.0 + (b * b - 3.0 * b) / 3.0)


def cubic_upper(b):
    return 1.0 + math.sqrt(1.0 + (b * b - 3.0 * b) / 3.0)


def x_fourth_branch(b):
    """Abscissa branch for f = x^4 on [-1, b]: solve 4c^3 = secant slope."""
    t = (b ** 4 - 1.0) / (4.0 * (b + 1.0))
    return math.copysign(abs(t) ** (1.0 / 3.0), t)


def bisect_root(fn, lo, hi, iters=200):
    """Plain bisection; assumes fn(lo) and fn(hi) have opposite signs."""
    flo = fn(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def poly_text(coeffs):
    """Expression text for sum coeffs[j] * x^j (coeffs[0] is the constant)."""
    parts = [repr(float(coeffs[0]))]
    for j, a in enumerate(coeffs[1:], start=1):
        parts.append(f"({float(a)!r})*x^{j}")
    return " + ".join(parts)


def poly_derivative(coeffs, order):
    """Coefficient list of the order-th derivative (exact integer factors)."""
    out = list(coeffs)
    for _ in range(order):
        out = [j * out[j] for j in range(1, len(out))]
        if not out:
            out = [0.0]
    return out


def poly_value(coeffs, x):
    acc = 0.0
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc


def grid_sign_change_roots(fn, lo, hi, n):
    """Brute-force root bracketing on a uniform n-point grid."""
    xs = np.linspace(lo, hi, n)
    fv = np.asarray(fn(xs), dtype=float)
    idx = np.nonzero(fv[:-1] * fv[1:] < 0)[0]
    return [bisect_root(lambda t: float(fn(t)), float(xs[i]), float(xs[i + 1]))
            for i in idx]
