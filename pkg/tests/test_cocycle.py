import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import GOLDEN, SQRT2M1
from torusconj.circle import circle_norm, rotate, winding_number, wrap
from torusconj.cocycle import (
    PiecewiseCircleMap,
    approx_coboundary_with_winding,
    build_omega,
    chord,
    cosine_sum,
    kappa_sums,
    shifted_sine_sum,
    shifted_sum_bound,
    sine_sum,
    sine_sum_bound,
    solve_coboundary_exact,
)
from torusconj.errors import SmallDenominatorError, TruncationError
from torusconj.functions import CircleValuedMap, SampledFunction, TrigPoly
from torusconj.rokhlin import build_tower

GRID = np.arange(2**12) / 2**12


def residual(f, g, theta):
    return np.max(np.abs(g(GRID) - g(GRID + theta) - f(GRID)))


def direct_kappa(F, G, theta, h, y):
    return sum(F.lift(rotate(y, theta, j)) - G.lift(rotate(y, theta, j)) for j in range(h))


def level_defects(tower, omega, F, G, per_level=2000):
    """max R/Z defect of omega over every level, sampled per level."""
    s, l, cols, _ = tower.levels()
    u = (np.arange(per_level) + 0.5) / per_level
    worst = 0.0
    for lo in range(0, s.size, 200):
        x = (s[lo : lo + 200, None] + l[lo : lo + 200, None] * u).ravel()
        D = F.lift(wrap(x)) + omega(x) - omega(rotate(x, tower.theta)) - G.lift(wrap(x))
        worst = max(worst, float(circle_norm(D).max()))
    return worst


class TestKappa:
    tower = build_tower(GOLDEN, 10)

    def test_equal_maps(self):
        F = CircleValuedMap(1, TrigPoly(0, [0.2]))
        for col in kappa_sums(self.tower, F, F):
            assert np.all(col(col.arc.start + col.arc.length * np.linspace(0, 0.99, 7)) == 0)

    def test_constant_rotation(self):
        F = CircleValuedMap(2, TrigPoly(0.1, [0.2]))
        G = CircleValuedMap(2, TrigPoly(0.4, [0.2]))
        for col in kappa_sums(self.tower, F, G):
            y = col.arc.start + 0.3 * col.arc.length
            assert col(y) == pytest.approx(-0.3 * col.height, abs=1e-12)

    def test_matches_orbit_sum(self):
        rng = np.random.default_rng(5)
        F = CircleValuedMap(1, TrigPoly(0.2, rng.normal(size=3), rng.normal(size=3)))
        G = CircleValuedMap(-2, TrigPoly(0.0, rng.normal(size=4), rng.normal(size=2)))
        for col in kappa_sums(self.tower, F, G):
            y = col.arc.start + col.arc.length * rng.random(10)
            assert np.max(np.abs(col(y) - direct_kappa(F, G, GOLDEN, col.height, y))) < 1e-12


class TestOmega:
    def test_equal_maps_zero(self):
        tower = build_tower(GOLDEN, 10)
        F = CircleValuedMap(1, TrigPoly(0, [0.3]))
        om = build_omega(tower, F, F)
        assert np.all(om(GRID) == 0.0)

    @pytest.mark.parametrize("n", [10, 50, 250])
    def test_constant_rotation_defect_formula(self, n):
        # kappa = -0.3 h, so each column's defect is ||0.3 h|| / h
        tower = build_tower(GOLDEN, n)
        F = CircleValuedMap(1)
        G = CircleValuedMap(1, TrigPoly(0.3))
        om = build_omega(tower, F, G)
        expect = max(circle_norm(0.3 * h) / h for h in tower.heights)
        got = level_defects(tower, om, F, G, 200)
        assert got == pytest.approx(expect, abs=1e-9)
        assert got < 1 / tower.min_height

    def test_defect_decreases_with_n(self):
        F, G = CircleValuedMap(1), CircleValuedMap(1, TrigPoly(0.3))
        vals = []
        for n in (10, 50, 250):
            tower = build_tower(GOLDEN, n)
            vals.append(level_defects(tower, build_omega(tower, F, G), F, G, 50))
        assert vals[0] > vals[1] > vals[2] >= 0

    def test_zero_on_base_and_tiles(self):
        tower = build_tower(SQRT2M1, 30)
        F = CircleValuedMap(2, TrigPoly(0.1, [0.4], [0.0, 0.2]))
        G = CircleValuedMap(-1, TrigPoly(0.0, [0.1]))
        om = build_omega(tower, F, G)
        for arc, _ in tower.arcs:
            assert np.all(om(arc.start + arc.length * np.linspace(0, 0.999, 101)) == 0.0)
        assert om.uncovered_length() < 1e-12

    @given(
        st.integers(-2, 2),
        st.integers(-2, 2),
        st.lists(st.floats(-0.5, 0.5), min_size=8, max_size=8),
        st.sampled_from([10, 30]),
    )
    def test_random_defect_bound(self, d1, d2, c, n):
        tower = build_tower(GOLDEN, n)
        F = CircleValuedMap(d1, TrigPoly(c[0], c[1:3], c[3:4]))
        G = CircleValuedMap(d2, TrigPoly(0.0, c[4:6], c[6:]))
        om = build_omega(tower, F, G)
        assert level_defects(tower, om, F, G, 100) < 1 / tower.min_height + 1e-9

    def test_json_roundtrip(self):
        tower = build_tower(GOLDEN, 10)
        om = build_omega(tower, CircleValuedMap(1, TrigPoly(0, [0.3])), CircleValuedMap(1))
        back = PiecewiseCircleMap.from_json(om.to_json())
        assert np.allclose(back(GRID), om(GRID), atol=1e-15)


class TestExactSolver:
    def test_zero(self):
        assert solve_coboundary_exact(TrigPoly.zero(), GOLDEN).sup_bound() == 0

    def test_sine(self):
        f = TrigPoly(0, [0.0], [1.0])
        g = solve_coboundary_exact(f, GOLDEN)
        c = 0.5 * (0 - 1j) / (1 - np.exp(2j * np.pi * GOLDEN))
        assert g.complex_coeffs()[0] == pytest.approx(c, abs=1e-15)
        assert residual(f, g, GOLDEN) < 1e-10

    def test_two_tones_magnitudes(self):
        f = TrigPoly(0, [0.3], [0, 0, 0.1])
        g = solve_coboundary_exact(f, SQRT2M1)
        assert residual(f, g, SQRT2M1) < 1e-10
        mags = np.abs(g.complex_coeffs())
        fm = np.abs(f.complex_coeffs())
        expect = fm / (2 * np.abs(np.sin(np.pi * np.arange(1, 4) * SQRT2M1)))
        assert np.allclose(mags, expect, atol=1e-14)

    def test_mean_rejected(self):
        with pytest.raises(ValueError):
            solve_coboundary_exact(TrigPoly(0.1, [1.0]), GOLDEN)

    def test_small_denominator(self):
        theta = 1 / 3 + 1e-15
        with pytest.raises(SmallDenominatorError) as info:
            solve_coboundary_exact(TrigPoly(0, [0, 0, 1.0]), theta)
        assert info.value.mode == 3

    @given(st.lists(st.floats(-1, 1), min_size=1, max_size=16), st.sampled_from([GOLDEN, SQRT2M1]))
    def test_random_residual(self, c, theta):
        f = TrigPoly(0, c, c[::-1])
        assert residual(f, solve_coboundary_exact(f, theta), theta) < 1e-10


class TestWindingCoboundary:
    def test_zero(self):
        k, g0, cert = approx_coboundary_with_winding(TrigPoly.zero(), GOLDEN, 1, 1e-2)
        assert k == 0 and g0.sup_bound() == 0 and cert.achieved == 0

    def test_constant_half(self):
        eps = 1e-2
        k, _, cert = approx_coboundary_with_winding(TrigPoly(0.5), GOLDEN, 1, eps)
        tol = eps / (4 * math.pi)
        brute = [j for j in range(-1597, 1598) if circle_norm(0.5 - j * GOLDEN) < tol]
        assert k in brute
        assert abs(k) == 305  # smallest admissible |k| in the scan
        assert cert.achieved < eps

    def test_cosine_degree_two(self):
        f = TrigPoly(0.5, [0.3])
        k, g0, cert = approx_coboundary_with_winding(f, SQRT2M1, 2, 1e-3)
        assert cert.achieved < 1e-3 and cert.winding == 2 * k
        g = CircleValuedMap(2 * k, g0)
        assert winding_number(g.samples(max(4096, 16 * abs(2 * k)))) == 2 * k

    def test_sampled_input(self):
        s = SampledFunction.from_callable(lambda x: 0.25 + 0.2 * np.sin(2 * np.pi * x) ** 3, 1024)
        k, g0, cert = approx_coboundary_with_winding(s, GOLDEN, 1, 1e-2)
        assert cert.achieved < 1e-2 and cert.degree <= 256

    def test_truncation_failure(self):
        rough = SampledFunction(np.random.default_rng(0).random(64) * 0.5)
        with pytest.raises(TruncationError):
            approx_coboundary_with_winding(rough, GOLDEN, 1, 1e-3)

    @given(st.floats(-1, 1), st.integers(-3, 3).filter(bool), st.sampled_from([1e-1, 1e-2, 1e-3]))
    def test_winding_is_kd(self, a, d, eps):
        k, g0, cert = approx_coboundary_with_winding(TrigPoly(a, [0.2], [0.1]), GOLDEN, d, eps)
        assert cert.achieved < eps
        assert winding_number(CircleValuedMap(k * d, g0).samples(max(4096, 16 * abs(k * d)))) == k * d


class TestTrigSums:
    def test_closed_form(self):
        th, n = 0.7, 25
        closed = (math.cos(th / 2) - math.cos((n + 0.5) * th)) / (2 * math.sin(th / 2))
        assert sine_sum(th, n) == pytest.approx(closed, abs=1e-12)

    @given(st.floats(0.01, 2 * math.pi - 0.01), st.integers(2, 2000), st.floats(0, 2 * math.pi))
    def test_bounds(self, th, n, shift):
        assert abs(sine_sum(th, n)) <= sine_sum_bound(th) + 1e-9
        assert abs(cosine_sum(th, n)) <= sine_sum_bound(th) + 1e-9
        assert abs(shifted_sine_sum(th, n, shift)) <= shifted_sum_bound(th) + 1e-9


def test_chord():
    assert chord(0.5) == pytest.approx(2.0)
    assert chord(0.0) == 0.0
