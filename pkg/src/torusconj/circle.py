"""Arithmetic on the circle R/Z and the 2-torus.

Points are stored by their R/Z coordinate in [0, 1); complex exponentials are
only formed when a distance is needed.  All functions accept numpy arrays as
well as plain floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InsufficientSamplingError, RationalRotationError

# Residual partial quotients above this are read as "the input is rational".
MAX_PARTIAL_QUOTIENT = 10**12

_SPLITTER = 134217729.0  # 2**27 + 1


def wrap(x):
    """Canonical representative in [0, 1)."""
    y = np.subtract(x, np.floor(x))
    # x - floor(x) rounds up to exactly 1.0 for tiny negative x
    y = np.where(y >= 1.0, 0.0, y)
    if np.ndim(y) == 0:
        return float(y)
    return y


def signed_wrap(x):
    """Representative in (-1/2, 1/2]."""
    y = np.subtract(x, np.ceil(np.subtract(x, 0.5)))
    if np.ndim(y) == 0:
        return float(y)
    return y


def circle_norm(x):
    """Distance from x to the nearest integer."""
    return np.abs(signed_wrap(x))


def _split(theta: float) -> tuple[float, float]:
    t = _SPLITTER * theta
    hi = t - (t - theta)
    return hi, theta - hi


def frac_multiple(theta: float, m):
    """frac(m * theta) for integer m, without the rounding of the product m*theta.

    theta is split into a 26-bit head (so m*head is exact for |m| < 2**27)
    and a tail whose product error is far below one ulp of the result.
    """
    m = np.asarray(m)
    if m.size and np.max(np.abs(m)) >= 2**27:
        raise ValueError("multiplier too large for the split product")
    hi, lo = _split(float(theta))
    mf = m.astype(np.float64)
    head = mf * hi
    head = head - np.floor(head)
    return wrap(head + mf * lo)


def rotate(x, theta: float, m=1):
    """x + m*theta mod 1."""
    return wrap(np.add(x, frac_multiple(theta, m)))


def circle_dist(a, b):
    """Chordal distance |e^{2 pi i a} - e^{2 pi i b}| = 2|sin(pi(a - b))|."""
    a = a.value if isinstance(a, CirclePoint) else a
    b = b.value if isinstance(b, CirclePoint) else b
    d = np.subtract(a, b)
    d = d - np.round(d)
    r = 2.0 * np.abs(np.sin(np.pi * d))
    if np.ndim(r) == 0:
        return float(r)
    return r


def torus_dist(p, q):
    """Product chordal metric on T^2; p and q are TorusPoints or (x, t) pairs."""
    px, pt = (p.x.value, p.t.value) if isinstance(p, TorusPoint) else p
    qx, qt = (q.x.value, q.t.value) if isinstance(q, TorusPoint) else q
    return np.hypot(circle_dist(px, qx), circle_dist(pt, qt))


@dataclass(frozen=True)
class CirclePoint:
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", wrap(float(self.value)))

    def __add__(self, other):
        other = other.value if isinstance(other, CirclePoint) else other
        return CirclePoint(self.value + other)

    def __sub__(self, other):
        other = other.value if isinstance(other, CirclePoint) else other
        return CirclePoint(self.value - other)

    def __neg__(self):
        return CirclePoint(-self.value)

    def __float__(self):
        return self.value

    def complex(self) -> complex:
        return complex(math.cos(2 * math.pi * self.value), math.sin(2 * math.pi * self.value))


@dataclass(frozen=True)
class TorusPoint:
    x: CirclePoint
    t: CirclePoint

    @classmethod
    def of(cls, x: float, t: float) -> "TorusPoint":
        return cls(CirclePoint(x), CirclePoint(t))

    def __iter__(self):
        yield self.x.value
        yield self.t.value


@dataclass(frozen=True)
class Arc:
    """An arc [start, start + length) of R/Z, possibly wrapping through 0.

    ``closure`` is one of ``"open"``, ``"left-closed"`` or ``"closed"``.
    """

    start: float
    length: float
    closure: str = "left-closed"

    def __post_init__(self):
        if not 0.0 < self.length <= 1.0:
            raise ValueError(f"arc length must lie in (0, 1], got {self.length}")
        if self.closure not in ("open", "left-closed", "closed"):
            raise ValueError(f"unknown closure {self.closure!r}")
        object.__setattr__(self, "start", wrap(float(self.start)))

    @property
    def end(self) -> float:
        return wrap(self.start + self.length)

    @property
    def complement_length(self) -> float:
        return 1.0 - self.length

    def offset(self, y):
        """Position of y measured from ``start`` along the arc, in [0, 1)."""
        return wrap(np.subtract(y, self.start))

    def contains(self, y):
        u = self.offset(y)
        if self.length >= 1.0:
            inside = np.ones_like(u, dtype=bool) if np.ndim(u) else True
            if self.closure == "open":
                inside = np.logical_and(inside, u != 0.0)
            return inside
        if self.closure == "open":
            res = np.logical_and(u > 0.0, u < self.length)
        elif self.closure == "left-closed":
            res = u < self.length
        else:
            res = np.logical_or(u <= self.length, u == 0.0)
        return bool(res) if np.ndim(res) == 0 else res

    def translate(self, s: float) -> "Arc":
        return Arc(self.start + s, self.length, self.closure)

    def to_json(self) -> dict:
        return {"start": self.start, "length": self.length, "closure": self.closure}


@dataclass(frozen=True)
class RationalApprox:
    p: int
    q: int
    error: float  # |q theta - p|
    signed_error: float = field(default=0.0, repr=False, compare=False)

    def __post_init__(self):
        if self.q <= 0:
            raise ValueError("denominator must be positive")
        if math.gcd(self.p, self.q) != 1:
            raise ValueError("convergent not in lowest terms")


def _as_fraction(theta) -> Fraction:
    return theta if isinstance(theta, Fraction) else Fraction(float(theta))


def _partial_quotients(theta: Fraction, depth: int) -> list[int]:
    """First ``depth`` partial quotients a_1, a_2, ... of theta in (0, 1)."""
    quotients = []
    rest = theta
    for _ in range(depth):
        if rest == 0:
            raise RationalRotationError(f"theta={float(theta)!r} is rational within depth {depth}")
        inv = 1 / rest
        a = math.floor(inv)
        if a > MAX_PARTIAL_QUOTIENT:
            raise RationalRotationError(
                f"partial quotient {a} exceeds {MAX_PARTIAL_QUOTIENT}; theta treated as rational"
            )
        quotients.append(a)
        rest = inv - a
    return quotients


def convergents(theta, depth: int) -> list[RationalApprox]:
    """Continued-fraction convergents p_k/q_k of theta in (0, 1).

    The list holds the best approximations of the second kind, so when
    a_1 = 1 the trivial 0/1 (which loses to 1/1) is left out.  The expansion
    is exact for the binary value of theta.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    frac = _as_fraction(theta)
    if not 0 < frac < 1:
        raise RationalRotationError(f"theta must lie strictly inside (0, 1), got {float(theta)!r}")
    quotients = _partial_quotients(frac, depth + 1)

    p_prev, q_prev = 1, 0
    p, q = 0, 1
    out = []
    for a in [None] + quotients:
        if a is not None:
            p, p_prev = a * p + p_prev, p
            q, q_prev = a * q + q_prev, q
        err = q * frac - p
        approx = RationalApprox(p, q, float(abs(err)), float(err))
        if out and out[-1].q == q:
            out[-1] = approx
        else:
            out.append(approx)
        if len(out) > depth:
            break
    return out[:depth]


def is_irrational(theta, depth: int = 8) -> bool:
    try:
        convergents(theta, depth)
    except RationalRotationError:
        return False
    return True


def _convergent_pairs(x: Fraction, max_depth: int):
    """(p_k, q_k) of the finite expansion of x, stopping where it terminates."""
    p_prev, q_prev, p, q = 1, 0, 0, 1
    rest = x
    for _ in range(max_depth):
        if rest == 0:
            return
        inv = 1 / rest
        a = math.floor(inv)
        rest = inv - a
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        yield p, q


def nearest_multiple(target, phi, tol: float, max_depth: int = 60) -> int:
    """Integer k with ||target - k*phi|| < tol, found along the convergents of phi.

    Each convergent error e_n = q_n phi - p_n is used once as a step size, so
    after stage n the residual is at most |e_n|/2 (an Ostrowski-type greedy
    expansion).  ``phi`` may be a float or an exact Fraction in (0, 1).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    phi = _as_fraction(phi)
    target = _as_fraction(target)

    def residual(k):
        return float(signed_wrap(float(target - k * phi - math.floor(target - k * phi))))

    k = 0
    r = residual(0)
    if abs(r) < tol:
        return 0
    for p, q in _convergent_pairs(phi, max_depth):
        e = q * phi - p
        if e == 0:
            break
        b = round(r / float(e))
        k += b * q
        r = residual(k)
        if abs(r) < tol:
            return k
    raise RationalRotationError("convergents exhausted before reaching the tolerance")


def winding_number(samples: Sequence[float]) -> int:
    """Degree of the closed loop through the given R/Z samples.

    Successive differences (including the closing step back to the first
    sample) are snapped to (-1/2, 1/2] and summed.  Each step must have
    chordal length below 1, i.e. cover less than a sixth of a turn.
    """
    s = np.asarray(samples, dtype=float)
    if s.ndim != 1 or s.size < 2:
        raise ValueError("need a 1-d array of at least two samples")
    steps = signed_wrap(np.diff(np.append(s, s[0])))
    worst = circle_dist(0.0, steps).max()
    if worst >= 1.0:
        raise InsufficientSamplingError(
            f"consecutive samples {worst:.3f} apart (chordal); refine the sampling"
        )
    total = float(np.sum(steps))
    n = round(total)
    if abs(total - n) > 1e-6:
        raise InsufficientSamplingError(f"lift does not close (increment {total})")
    return int(n)
