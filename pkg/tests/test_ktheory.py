import itertools

import pytest
from hypothesis import assume, given, strategies as st

from conftest import GOLDEN, SQRT2M1
from torusconj.circle import circle_norm, is_irrational
from torusconj.functions import TrigPoly
from torusconj.furstenberg import FurstenbergMap
from torusconj.ktheory import KInvariant, isomorphic, k_invariant, theta_class


def inv(theta, d):
    return k_invariant(FurstenbergMap(theta, d, TrigPoly(0.1, [0.2])))


def test_golden_d2():
    i = inv(GOLDEN, 2)
    assert i.theta_class == pytest.approx(min(GOLDEN, 1 - GOLDEN))
    assert i.torsion == 2 and i.k0_rank == 3
    assert "Z/2Z" in i.k1_shape


def test_torsion_is_abs_d():
    assert inv(GOLDEN, 1).torsion == 1
    assert inv(GOLDEN, -3).torsion == 3


def test_examples():
    assert isomorphic(inv(GOLDEN, 2), inv(GOLDEN, 2))
    assert isomorphic(inv(GOLDEN, 2), inv(1 - GOLDEN, -2))
    assert not isomorphic(inv(GOLDEN, 1), inv(GOLDEN, 2))


def test_validation():
    with pytest.raises(ValueError):
        KInvariant(0.3, 0)
    with pytest.raises(ValueError):
        isomorphic(inv(GOLDEN, 1), inv(GOLDEN, 1), tol=0)


def test_json():
    assert inv(SQRT2M1, 3).to_json()["torsion"] == 3


thetas = st.floats(0.01, 0.99).filter(lambda t: is_irrational(t, 16))
degrees = st.integers(-4, 4).filter(bool)


@given(thetas, degrees)
def test_reflexive(t, d):
    assert isomorphic(inv(t, d), inv(t, d))


@given(thetas, degrees, thetas, degrees)
def test_symmetric(t1, d1, t2, d2):
    assert isomorphic(inv(t1, d1), inv(t2, d2)) == isomorphic(inv(t2, d2), inv(t1, d1))


@given(thetas, degrees, st.floats(-1e-10, 1e-10), st.floats(-1e-10, 1e-10))
def test_transitive(t, d, e1, e2):
    # each step within tol/2 so the composite stays within tol
    assume(is_irrational(t + e1, 16) and is_irrational(1 - t - e1 + e2, 16))
    a, b, c = inv(t, d), inv(t + e1, -d), inv(1 - t - e1 + e2, d)
    if isomorphic(a, b, 5e-10) and isomorphic(b, c, 5e-10):
        assert isomorphic(a, c, 1e-9)


@given(thetas, degrees, thetas, degrees)
def test_matches_condition(t1, d1, t2, d2):
    cond = (circle_norm(t1 - t2) <= 1e-9 or circle_norm(t1 + t2) <= 1e-9) and abs(d1) == abs(d2)
    assert isomorphic(inv(t1, d1), inv(t2, d2)) == cond


def test_theta_class_range():
    for t in (0.1, 0.5, 0.9, 1.3, -0.2):
        assert 0 <= theta_class(t) <= 0.5
