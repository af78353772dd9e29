import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import GOLDEN, SQRT2M1
from torusconj.circle import Arc, is_irrational, wrap
from torusconj.errors import ReturnTimeCapError
from torusconj.rokhlin import build_tower, first_return


def brute_return(theta, start, length, y, cap=10**6):
    """Plain iteration of y -> y + theta until it lands in [start, start + length)."""
    x = y
    for m in range(1, cap):
        x = (x + theta) % 1.0
        if (x - start) % 1.0 < length:
            return m
    raise AssertionError("no return")


def brute_visits_before(theta, start, length, y, m):
    """True when none of y + j theta, 0 < j < m, is in the arc."""
    return all((y + j * theta - start) % 1.0 >= length for j in range(1, m))


class TestFirstReturn:
    def test_golden_half(self):
        base = Arc(0.0, 0.5)
        assert first_return(GOLDEN, base, 0.25) == brute_return(GOLDEN, 0.0, 0.5, 0.25)

    def test_full_circle(self):
        assert first_return(SQRT2M1, Arc(0.3, 1.0), 0.7) == 1

    def test_small_base(self):
        base = Arc(0.0, 0.1)
        r = first_return(SQRT2M1, base, 0.05)
        assert r == brute_return(SQRT2M1, 0.0, 0.1, 0.05)
        assert brute_visits_before(SQRT2M1, 0.0, 0.1, 0.05, r)

    def test_outside_base(self):
        with pytest.raises(ValueError):
            first_return(GOLDEN, Arc(0.0, 0.1), 0.5)

    def test_cap(self):
        with pytest.raises(ReturnTimeCapError):
            first_return(GOLDEN, Arc(0.0, 0.001), 0.0005, cap=5)

    @given(st.floats(0.0, 0.9999), st.floats(0.01, 0.3))
    def test_vectorized_matches_brute(self, start, length):
        rng = np.random.default_rng(0)
        ys = wrap(start + length * rng.random(20))
        got = first_return(GOLDEN, Arc(start, length), ys)
        for y, r in zip(ys, got):
            assert r == brute_return(GOLDEN, wrap(start), length, y)


class TestTower:
    def test_golden_n10_heights(self):
        # base [0, ||13 theta||): columns of height 34 and 21 over arcs ||21 theta|| and ||34 theta||
        t = build_tower(GOLDEN, 10)
        got = sorted((h, round(a.length, 12)) for a, h in t.arcs)
        expect = sorted(
            [(34, round(abs(21 * GOLDEN - 13), 12)), (21, round(abs(34 * GOLDEN - 21), 12))]
        )
        assert got == expect

    def test_golden_small_n_fibonacci(self):
        t = build_tower(GOLDEN, 2)
        hs = sorted(set(t.heights.tolist()))
        fib = [1, 2, 3, 5, 8, 13, 21]
        assert len(hs) == 2 and hs[0] in fib and hs[1] in fib
        assert fib.index(hs[1]) == fib.index(hs[0]) + 1

    @pytest.mark.parametrize("theta", [GOLDEN, SQRT2M1])
    @pytest.mark.parametrize("n", [10, 100])
    def test_invariants(self, theta, n):
        t = build_tower(theta, n)
        overlap, gap = t.overlap_and_gap()
        assert overlap <= 1e-12 and gap < 1e-12
        assert abs(t.total_mass() - 1.0) < 1e-12
        assert t.min_height >= n

    def test_column_heights_match_brute(self):
        t = build_tower(SQRT2M1, 20)
        rng = np.random.default_rng(1)
        Y = t.base_length
        for y in Y * rng.random(200):
            col = next(h for a, h in t.arcs if a.contains(y))
            assert col == brute_return(SQRT2M1, 0.0, Y, y)

    def test_locate(self):
        t = build_tower(GOLDEN, 10)
        arc, h = t.arcs[0]
        y = arc.start + 0.5 * arc.length
        col, lev = t.locate(wrap(y + 7 * GOLDEN))
        assert int(col) == 0 and int(lev) == 7

    def test_custom_base(self):
        base = Arc(0.3, 0.05)
        t = build_tower(GOLDEN, 5, base)
        assert abs(t.total_mass() - 1) < 1e-12 and t.is_disjoint()

    def test_json(self):
        data = build_tower(GOLDEN, 10).to_json()
        assert set(data) == {"theta", "arcs", "exceptional"}
        assert {"start", "length", "height"} <= set(data["arcs"][0])

    @given(st.floats(0.05, 0.95).filter(lambda t: is_irrational(t, 20)), st.integers(2, 200))
    def test_random_invariants(self, theta, n):
        t = build_tower(theta, n)
        assert t.min_height >= n
        assert abs(t.total_mass() - 1.0) < 1e-12
        assert t.is_disjoint()
