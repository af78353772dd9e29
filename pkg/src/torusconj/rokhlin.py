"""Rokhlin towers for an irrational rotation of the circle.

A tower is a base arc Y cut into sub-arcs J_i on which the first return
time to Y is constant (h_i).  The levels J_i + j theta, 0 <= j < h_i, tile
the circle; every arc is half-open so the tiling is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circle import Arc, convergents, frac_multiple, rotate, wrap
from .errors import ReturnTimeCapError

MERGE_TOL = 1e-14
MIN_SEPARATION = 1e-10


def default_cap(base: Arc) -> int:
    return 10 * math.ceil(1.0 / base.length)


def first_return(theta: float, base: Arc, y, cap: int = None):
    """Least m >= 1 with y + m theta in ``base``; vectorized over y."""
    cap = default_cap(base) if cap is None else cap
    y = np.asarray(y, dtype=float)
    if not np.all(base.contains(y)):
        raise ValueError("starting point outside the base arc")
    flat = y.reshape(-1)
    out = np.zeros(flat.size, dtype=np.int64)
    active = np.arange(flat.size)
    for m in range(1, cap + 1):
        hit = base.contains(rotate(flat[active], theta, m))
        hit = np.atleast_1d(hit)
        out[active[hit]] = m
        active = active[~hit]
        if active.size == 0:
            break
    else:
        raise ReturnTimeCapError(f"{active.size} points did not return within {cap} steps")
    return int(out[0]) if y.ndim == 0 else out.reshape(y.shape)


def default_base_length(theta: float, n: int) -> float:
    """||q theta|| for the first convergent denominator q >= n."""
    depth = 4
    while True:
        convs = convergents(theta, depth)
        for c in convs:
            if c.q >= n:
                return c.error
        depth *= 2


@dataclass(frozen=True, eq=False)
class RokhlinTower:
    theta: float
    arcs: tuple  # of (Arc, height)
    exceptional: tuple = ()

    @property
    def heights(self) -> np.ndarray:
        return np.array([h for _, h in self.arcs], dtype=np.int64)

    @property
    def min_height(self) -> int:
        return int(self.heights.min())

    @property
    def base_length(self) -> float:
        return float(sum(a.length for a, _ in self.arcs))

    def total_mass(self) -> float:
        return float(sum(h * a.length for a, h in self.arcs))

    def levels(self):
        """Arrays (start, length, column, level) over every level of every column."""
        starts, lengths, cols, levs = [], [], [], []
        for i, (arc, h) in enumerate(self.arcs):
            j = np.arange(h)
            starts.append(rotate(arc.start, self.theta, j))
            lengths.append(np.full(h, arc.length))
            cols.append(np.full(h, i))
            levs.append(j)
        return (
            np.concatenate(starts),
            np.concatenate(lengths),
            np.concatenate(cols),
            np.concatenate(levs),
        )

    def overlap_and_gap(self):
        """(largest overlap, total uncovered length) of the sorted levels."""
        s, l, _, _ = self.levels()
        order = np.argsort(s)
        s, l = s[order], l[order]
        ends = s + l
        nxt = np.append(s[1:], s[0] + 1.0)
        diff = nxt - ends
        overlap = float(max(0.0, -diff.min()))
        gap = float(np.clip(diff, 0.0, None).sum())
        return overlap, gap

    def is_disjoint(self, tol: float = 1e-12) -> bool:
        return self.overlap_and_gap()[0] <= tol

    def locate(self, x):
        """Column and level of the tower level containing x (vectorized)."""
        s, l, cols, levs = self.levels()
        order = np.argsort(s)
        s_sorted = s[order]
        idx = np.searchsorted(s_sorted, wrap(np.asarray(x, dtype=float)), side="right") - 1
        idx = np.where(idx < 0, idx + s_sorted.size, idx)
        return cols[order][idx], levs[order][idx]

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "arcs": [{"start": a.start, "length": a.length, "height": int(h)} for a, h in self.arcs],
            "exceptional": [float(p) for p in self.exceptional],
        }


def _breakpoints(theta: float, base: Arc, cap: int) -> np.ndarray:
    m = np.arange(1, cap + 1)
    pts = np.concatenate([rotate(base.start, -theta, m), rotate(base.end, -theta, m)])
    u = base.offset(pts)
    u = u[(u > 0.0) & (u < base.length)]
    u = np.sort(np.concatenate(([0.0, base.length], u)))
    keep = np.concatenate(([True], np.diff(u) > MERGE_TOL))
    u = u[keep]
    if u.size > 1 and np.diff(u).min() < MIN_SEPARATION:
        raise ReturnTimeCapError(
            "breakpoints closer than 1e-10; the tower is too fine for double precision"
        )
    return u


def build_tower(theta: float, n: int, base: Arc = None) -> RokhlinTower:
    """Tower over ``base`` (default [0, ||q theta||) with q the first convergent >= n)."""
    if n < 1:
        raise ValueError("n must be positive")
    if base is None:
        base = Arc(0.0, default_base_length(theta, n))
    cap = default_cap(base)
    u = _breakpoints(theta, base, cap)
    mids = base.start + 0.5 * (u[:-1] + u[1:])
    heights = first_return(theta, base, wrap(mids), cap)

    arcs = []
    lo = u[0]
    for k in range(heights.size):
        last = k + 1 == heights.size
        if last or heights[k + 1] != heights[k]:
            arcs.append((Arc(base.start + lo, u[k + 1] - lo), int(heights[k])))
            lo = u[k + 1]
    tower = RokhlinTower(float(theta), tuple(arcs), tuple(wrap(base.start + u)))
    if tower.min_height < n:
        raise ReturnTimeCapError(
            f"base arc of length {base.length:.3g} gives height {tower.min_height} < {n}"
        )
    return tower
