"""Branch tracing: predictor-corrector marches and post-degeneracy seeds."""

import math

import numpy as np
import pytest

import mvabscissa as mva
from mvabscissa import classify, continuation, mvt
from mvabscissa.errors import SeedNotRegular

from conftest import cubic_lower, cubic_upper


class TestTraceCOfB:
    def test_parabola_half_line(self, parabola):
        br = continuation.trace_c_of_b(parabola, 2.0, 1.0, (0.5, 3.5), step=0.01)
        assert br.seed_case == "REGULAR_C"
        assert max(abs(q.c - q.b / 2.0) for q in br.points) <= 1e-8
        assert br.points[0].b <= 0.5 + 1e-9
        assert br.points[-1].b >= 3.5 - 1e-9

    def test_cubic_upper_branch(self, cubic):
        br = continuation.trace_c_of_b(cubic, 3.0, 2.0, (1.0, 3.5), step=0.01)
        for q in br.points:
            assert abs(q.c - cubic_upper(q.b)) <= 1e-8

    def test_cubic_lower_branch(self, cubic):
        c0 = (6.0 - math.sqrt(21.0)) / 6.0
        br = continuation.trace_c_of_b(cubic, 2.5, c0, (0.5, 2.5), step=0.01)
        for q in br.points:
            assert abs(q.c - cubic_lower(q.b)) <= 1e-8

    def test_b_strictly_monotone_and_residuals_small(self, cubic):
        br = continuation.trace_c_of_b(cubic, 3.0, 2.0, (1.5, 3.5), step=0.02)
        bs = [q.b for q in br.points]
        assert all(b2 > b1 for b1, b2 in zip(bs, bs[1:]))
        assert all(q.residual <= 1e-10 for q in br.points)

    def test_seed_index_points_at_seed(self, parabola):
        br = continuation.trace_c_of_b(parabola, 2.0, 1.0, (1.0, 3.0), step=0.05)
        q = br.points[br.seed_index]
        assert (q.b, q.c) == (2.0, 1.0)

    def test_secant_identity_along_branch(self, cubic):
        br = continuation.trace_c_of_b(cubic, 3.0, 2.0, (2.0, 3.4), step=0.02)
        for q in br.points:
            assert abs(float(mvt.big_f(cubic, q.b, q.c)[0])) <= 1e-10

    def test_numerical_slope_matches_implicit_formula(self, cubic):
        br = continuation.trace_c_of_b(cubic, 3.0, 2.0, (2.0, 3.4), step=0.01)
        pts = br.points
        for i in range(1, len(pts) - 1):
            value, f_b, f_c = (float(v) for v in
                               mvt.big_f(cubic, pts[i].b, pts[i].c))
            if abs(f_c) <= 1e-3:
                continue
            fd = (pts[i + 1].c - pts[i - 1].c) / (pts[i + 1].b - pts[i - 1].b)
            assert abs(fd - (-f_b / f_c)) <= 1e-4

    def test_reversibility(self, parabola):
        fwd = continuation.trace_c_of_b(parabola, 2.0, 1.0, (2.0, 3.5), step=0.01)
        far = fwd.points[-1]
        back = continuation.trace_c_of_b(parabola, far.b, far.c, (2.0, far.b),
                                         step=0.01)
        at_seed = min(back.points, key=lambda q: abs(q.b - 2.0))
        assert abs(at_seed.b - 2.0) <= 1e-9
        assert abs(at_seed.c - 1.0) <= 1e-7

    def test_unique_odd_seed_uses_bisection(self, x_fourth):
        br = continuation.trace_c_of_b(x_fourth, 1.0, 0.0, (0.8, 1.2), step=0.01)
        assert br.seed_case == "UNIQUE_ODD"
        for q in br.points:
            t = (q.b ** 4 - 1.0) / (4.0 * (q.b + 1.0))
            want = math.copysign(abs(t) ** (1.0 / 3.0), t)
            assert abs(q.c - want) <= 1e-7

    def test_refuses_two_branch_seed(self, quintic_same_sign):
        with pytest.raises(SeedNotRegular):
            continuation.trace_c_of_b(quintic_same_sign, 3.0, 1.0, (2.5, 3.5))

    def test_refuses_inflection_seed(self, quartic_inflection):
        with pytest.raises(SeedNotRegular):
            continuation.trace_c_of_b(quartic_inflection, 3.0, 1.0, (2.5, 3.5))

    def test_seed_outside_range_rejected(self, parabola):
        with pytest.raises(ValueError):
            continuation.trace_c_of_b(parabola, 2.0, 1.0, (2.5, 3.0))

    def test_no_silent_branch_jump(self, quintic_same_sign):
        # upper branch folds where f'' vanishes; the trace must stop there
        # rather than hop to the lower branch
        rep = classify.classify_point(quintic_same_sign, 3.0, 1.0)
        seeds = continuation.branch_seeds_after_degeneracy(
            quintic_same_sign, 3.0, 1.0, rep)
        b1, c1 = max(seeds, key=lambda s: s[1])
        br = continuation.trace_c_of_b(quintic_same_sign, b1, c1,
                                       (b1, b1 + 1.0), step=0.005)
        cs = [q.c for q in br.points]
        assert all(c > 1.0 for c in cs)
        assert max(abs(c2 - c1_) for c1_, c2 in zip(cs, cs[1:])) < 0.05
        assert br.stop_upper in (continuation.STOP_DEGENERATE,
                                 continuation.STOP_CORRECTOR)


class TestTraceBOfC:
    def test_parabola_inverse_branch(self, parabola):
        br = continuation.trace_b_of_c(parabola, 2.0, 1.0, (0.4, 1.6), step=0.01)
        assert br.parameter == "c"
        for q in br.points:
            assert abs(q.b - 2.0 * q.c) <= 1e-8

    def test_inflection_quartic_b_branch_exists(self, quartic_inflection):
        br = continuation.trace_b_of_c(quartic_inflection, 3.0, 1.0,
                                       (0.9, 1.1), step=0.002)
        assert len(br.points) > 50
        for q in br.points:
            assert abs(float(mvt.big_f(quartic_inflection, q.b, q.c)[0])) <= 1e-9

    def test_flat_seed_is_rejected(self, quintic_same_sign):
        # f'(3) = f'(1) = 0 for this quintic
        with pytest.raises(SeedNotRegular):
            continuation.trace_b_of_c(quintic_same_sign, 3.0, 1.0, (0.5, 1.5))

    def test_c_strictly_monotone(self, parabola):
        br = continuation.trace_b_of_c(parabola, 2.0, 1.0, (0.5, 1.5), step=0.05)
        cs = [q.c for q in br.points]
        assert all(c2 > c1 for c1, c2 in zip(cs, cs[1:]))


class TestBranchSeeds:
    def test_two_branch_seed_pair(self, quintic_same_sign):
        rep = classify.classify_point(quintic_same_sign, 3.0, 1.0)
        seeds = continuation.branch_seeds_after_degeneracy(
            quintic_same_sign, 3.0, 1.0, rep, step0=0.01)
        assert len(seeds) == 2
        (b1, c_lo), (b2, c_hi) = sorted(seeds, key=lambda s: s[1])
        assert b1 == b2 == 3.01
        assert c_lo < 1.0 < c_hi
        for b, c in seeds:
            assert abs(float(mvt.big_f(quintic_same_sign, b, c)[0])) <= 1e-10

    def test_isolated_case_is_a_precondition_error(self, sextic_opposite):
        rep = classify.classify_point(sextic_opposite, 3.0, 1.0)
        with pytest.raises(ValueError):
            continuation.branch_seeds_after_degeneracy(
                sextic_opposite, 3.0, 1.0, rep)

    def test_seeds_extend_to_branches(self, quintic_same_sign):
        rep = classify.classify_point(quintic_same_sign, 3.0, 1.0)
        seeds = continuation.branch_seeds_after_degeneracy(
            quintic_same_sign, 3.0, 1.0, rep)
        for b, c in seeds:
            br = continuation.trace_c_of_b(quintic_same_sign, b, c,
                                           (b, b + 0.2), step=0.005)
            # the upper branch folds (f'' = 0) before the range ends
            assert len(br.points) >= 15
            assert all(q.residual <= 1e-8 for q in br.points)


class TestBranchSerialization:
    def test_to_dict_round_trip_fields(self, parabola):
        br = continuation.trace_c_of_b(parabola, 2.0, 1.0, (1.5, 2.5), step=0.1)
        d = br.to_dict()
        assert d["parameter"] == "b"
        assert d["seed_case"] == "REGULAR_C"
        assert len(d["points"]) == len(br.points)
        assert d["points"][d["seed_index"]]["b"] == 2.0
