"""Furstenberg skew products (x, t) -> (x + theta, t + d x + f(x)) on the 2-torus."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circle import TorusPoint, frac_multiple, is_irrational, rotate, torus_dist, wrap
from .errors import RationalRotationError
from .functions import Phase, SampledFunction, TrigPoly, phase_from_json, phase_lipschitz

BLOCK = 4096


@dataclass(frozen=True, eq=False)
class FurstenbergMap:
    theta: float
    d: int
    f: Phase = TrigPoly.zero()

    def __post_init__(self):
        theta = float(self.theta)
        if not 0.0 < theta < 1.0 or not is_irrational(theta):
            raise RationalRotationError(f"theta={theta!r} is not an irrational number in (0, 1)")
        if int(self.d) != self.d or int(self.d) == 0:
            raise ValueError("the fiber degree d must be a nonzero integer")
        if not isinstance(self.f, (TrigPoly, SampledFunction)):
            raise TypeError("f must be a TrigPoly or SampledFunction")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "d", int(self.d))

    def cocycle_lift(self, x):
        """d x + f(x) for x in [0, 1): the fiber increment as a real number."""
        x = np.asarray(x, dtype=float)
        return self.d * x + self.f(x)

    def __call__(self, x, t):
        x = wrap(np.asarray(x, dtype=float))
        return rotate(x, self.theta), wrap(np.asarray(t, dtype=float) + self.cocycle_lift(x))

    def inverse(self, x, t):
        x0 = rotate(np.asarray(x, dtype=float), -self.theta)
        return x0, wrap(np.asarray(t, dtype=float) - self.cocycle_lift(x0))

    def apply(self, p: TorusPoint) -> TorusPoint:
        return TorusPoint.of(*self(*p))

    def apply_inverse(self, p: TorusPoint) -> TorusPoint:
        return TorusPoint.of(*self.inverse(*p))

    def orbit(self, start, n: int):
        """First n points of the orbit of ``start`` as two arrays (x_j, t_j)."""
        x0, t0 = start
        j = np.arange(n)
        xs = wrap(float(x0) + frac_multiple(self.theta, j))
        incs = wrap(self.cocycle_lift(xs))
        ts = np.empty(n)
        acc = float(t0)
        # cumulative sums are wrapped once per block so the lift never grows
        for lo in range(0, n, BLOCK):
            chunk = incs[lo : lo + BLOCK]
            partial = acc + np.concatenate(([0.0], np.cumsum(chunk[:-1])))
            ts[lo : lo + BLOCK] = wrap(partial)
            acc = wrap(acc + chunk.sum())
        return xs, ts

    def lipschitz(self) -> float:
        """Lipschitz bound in lifted coordinates with the sum metric."""
        return 1.0 + abs(self.d) + phase_lipschitz(self.f)

    def to_json(self) -> dict:
        return {"theta": self.theta, "d": self.d, "f": self.f.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "FurstenbergMap":
        f = phase_from_json(data["f"]) if data.get("f") is not None else TrigPoly.zero()
        return cls(data["theta"], data["d"], f)

    def __repr__(self):
        return f"FurstenbergMap(theta={self.theta!r}, d={self.d}, f={self.f!r})"


def apply(m: FurstenbergMap, p: TorusPoint) -> TorusPoint:
    return m.apply(p)


def apply_inverse(m: FurstenbergMap, p: TorusPoint) -> TorusPoint:
    return m.apply_inverse(p)


@dataclass(frozen=True)
class FlipCertificate:
    kind: str  # "base-flip" or "fiber-flip"
    grid: int
    defect: float

    def to_json(self) -> dict:
        return {"kind": self.kind, "grid": self.grid, "defect": self.defect}


def base_flip(x, t):
    return wrap(-np.asarray(x, dtype=float)), wrap(np.asarray(t, dtype=float))


def fiber_flip(x, t):
    return wrap(np.asarray(x, dtype=float)), wrap(-np.asarray(t, dtype=float))


def conjugacy_defect(sigma, alpha, beta, x, t):
    """Pointwise dist(sigma(alpha(p)), beta(sigma(p)))."""
    lhs = sigma(*alpha(x, t))
    rhs = beta(*sigma(x, t))
    return torus_dist(lhs, rhs)


def _certify(kind, flip, alpha, beta, grid=64) -> FlipCertificate:
    g = (np.arange(grid) + 0.5) / grid
    X, T = np.meshgrid(g, g, indexing="ij")
    defect = float(np.max(conjugacy_defect(flip, alpha, beta, X.ravel(), T.ravel())))
    return FlipCertificate(kind, grid, defect)


def flip_base(m: FurstenbergMap):
    """Conjugate by (x, t) -> (-x, t); gives rotation -theta, degree -d, f(-x)."""
    flipped = FurstenbergMap(wrap(-m.theta), -m.d, m.f.reflect())
    return flipped, _certify("base-flip", base_flip, m, flipped)


def flip_fiber(m: FurstenbergMap):
    """Conjugate by (x, t) -> (x, -t); gives degree -d and phase -f."""
    flipped = FurstenbergMap(m.theta, -m.d, -m.f)
    return flipped, _certify("fiber-flip", fiber_flip, m, flipped)


def birkhoff_average(m: FurstenbergMap, phi, start, n: int) -> float:
    if n < 1:
        raise ValueError("need at least one iterate")
    if isinstance(start, TorusPoint):
        start = tuple(start)
    total = 0.0
    # orbit in chunks so memory stays flat for n ~ 10^7
    x0, t0 = start
    chunk = 1 << 18
    done = 0
    while done < n:
        k = min(chunk, n - done)
        xs, ts = m.orbit((x0, t0), k + 1)
        total += float(np.sum(phi(xs[:k], ts[:k])))
        x0, t0 = xs[k], ts[k]
        done += k
    return total / n
