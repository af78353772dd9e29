import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import GOLDEN
from torusconj.circle import TorusPoint, torus_dist, wrap
from torusconj.errors import RationalRotationError
from torusconj.functions import SampledFunction, TrigPoly
from torusconj.furstenberg import (
    FurstenbergMap,
    apply,
    apply_inverse,
    birkhoff_average,
    conjugacy_defect,
    flip_base,
    flip_fiber,
)

F_COS = TrigPoly(0.0, [0.3])


class TestApply:
    def test_examples(self):
        m = FurstenbergMap(GOLDEN, 1)
        assert tuple(apply(m, TorusPoint.of(0, 0))) == pytest.approx((GOLDEN, 0))
        assert tuple(apply(m, TorusPoint.of(0.5, 0))) == pytest.approx((wrap(0.5 + GOLDEN), 0.5))
        m2 = FurstenbergMap(GOLDEN, 2, TrigPoly(0.25))
        assert tuple(apply(m2, TorusPoint.of(0.5, 0.1))) == pytest.approx((wrap(0.5 + GOLDEN), 0.35))

    def test_inverse_examples(self):
        m = FurstenbergMap(GOLDEN, 1)
        assert tuple(apply_inverse(m, TorusPoint.of(GOLDEN, 0))) == pytest.approx((0, 0), abs=1e-15)
        m2 = FurstenbergMap(GOLDEN, 2, TrigPoly(0.25))
        back = apply_inverse(m2, TorusPoint.of(0.5 + GOLDEN, 0.35))
        assert tuple(back) == pytest.approx((0.5, 0.1))

    def test_validation(self):
        with pytest.raises(RationalRotationError):
            FurstenbergMap(0.5, 1)
        with pytest.raises(ValueError):
            FurstenbergMap(GOLDEN, 0)

    def test_roundtrip_bulk(self):
        rng = np.random.default_rng(3)
        x, t = rng.random(1000), rng.random(1000)
        m = FurstenbergMap(GOLDEN, -3, TrigPoly(0.1, [0.3], [0, 0.2]))
        assert np.max(torus_dist((x, t), m.inverse(*m(x, t)))) < 1e-12

    @given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True), st.integers(-4, 4).filter(bool))
    def test_roundtrip_property(self, x, t, d):
        m = FurstenbergMap(GOLDEN, d, F_COS)
        assert torus_dist((x, t), m.inverse(*m(x, t))) < 1e-12

    def test_preserves_measure_on_cells(self):
        # the image of a stratified grid is again equidistributed in cells
        N, sub = 32, 8
        g = (np.arange(N * sub) + 0.5) / (N * sub)
        X, T = np.meshgrid(g, g, indexing="ij")
        m = FurstenbergMap(GOLDEN, 2, F_COS)
        x, t = m(X.ravel(), T.ravel())
        counts = np.bincount((x * N).astype(int) * N + (t * N).astype(int), minlength=N * N)
        assert np.max(np.abs(counts - sub * sub)) / (sub * sub) <= 2 / sub


class TestOrbit:
    def test_orbit_matches_iteration(self):
        m = FurstenbergMap(GOLDEN, 2, F_COS)
        xs, ts = m.orbit((0.1, 0.2), 10000)
        x, t = 0.1, 0.2
        for j in range(0, 10000):
            if j in (0, 1, 57, 4095, 4096, 9999):
                assert torus_dist((xs[j], ts[j]), (x, t)) < 1e-9
            x, t = m(x, t)


class TestFlips:
    def test_base_flip_example(self):
        m = FurstenbergMap(GOLDEN, 1)
        flipped, cert = flip_base(m)
        assert flipped.theta == pytest.approx(1 - GOLDEN) and flipped.d == -1
        assert cert.defect < 1e-12

    def test_fiber_flip_example(self):
        m = FurstenbergMap(GOLDEN, 2, F_COS)
        flipped, cert = flip_fiber(m)
        assert flipped.d == -2 and flipped.f.allclose(-F_COS)
        assert cert.defect < 1e-12

    @pytest.mark.parametrize("flip", [flip_base, flip_fiber])
    def test_involution(self, flip):
        m = FurstenbergMap(GOLDEN, 3, TrigPoly(0.2, [0.1], [0.0, 0.3]))
        twice = flip(flip(m)[0])[0]
        assert twice.theta == pytest.approx(m.theta) and twice.d == m.d
        assert twice.f.allclose(m.f)

    def test_sampled_phase_flip(self):
        f = SampledFunction.from_callable(lambda x: 0.2 * np.sin(2 * np.pi * x) + 0.1, 256)
        m = FurstenbergMap(GOLDEN, 1, f)
        flipped, cert = flip_base(m)
        assert cert.defect < 1e-12

    @given(st.integers(-4, 4).filter(bool), st.lists(st.floats(-0.5, 0.5), min_size=4, max_size=4))
    def test_flip_certificates(self, d, c):
        m = FurstenbergMap(GOLDEN, d, TrigPoly(c[0], c[1:3], c[3:]))
        assert flip_base(m)[1].defect < 1e-12
        assert flip_fiber(m)[1].defect < 1e-12


class TestBirkhoff:
    m = FurstenbergMap(GOLDEN, 1)

    def test_constant(self):
        assert birkhoff_average(self.m, lambda x, t: np.ones_like(x), (0.1, 0.2), 17) == 1.0

    def test_fiber_cosine(self):
        avg = birkhoff_average(self.m, lambda x, t: np.cos(2 * np.pi * t), (0.0, 0.0), 10**6)
        assert abs(avg) < 1e-2

    def test_base_cosine(self):
        avg = birkhoff_average(self.m, lambda x, t: np.cos(2 * np.pi * x), (0.0, 0.0), 10**6)
        assert abs(avg) < 1e-3
