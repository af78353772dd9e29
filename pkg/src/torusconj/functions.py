"""Real functions on the circle and the circle-valued maps built from them.

Phases are always kept as real (lifted) functions; reduction mod 1 happens
only when a CircleValuedMap is evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .circle import frac_multiple, wrap

TWO_PI = 2.0 * math.pi
DEFAULT_GRID = 2**12
_ANCHOR = 16  # recurrence length between exact evaluations


def _coeffs(values) -> np.ndarray:
    arr = np.asarray(values if values is not None else [], dtype=float)
    return arr.reshape(-1).copy()


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """constant + sum_k a_k cos(2 pi k t) + b_k sin(2 pi k t), k = 1..K."""

    constant: float = 0.0
    cos: np.ndarray = field(default_factory=lambda: np.zeros(0))
    sin: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        a, b = _coeffs(self.cos), _coeffs(self.sin)
        n = max(a.size, b.size)
        a = np.pad(a, (0, n - a.size))
        b = np.pad(b, (0, n - b.size))
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "cos", a)
        object.__setattr__(self, "sin", b)

    @classmethod
    def zero(cls) -> "TrigPoly":
        return cls(0.0)

    @classmethod
    def from_complex(cls, c0: float, c: np.ndarray) -> "TrigPoly":
        """From complex coefficients c_m (m >= 1) of sum c_m e^{2 pi i m t} + conj."""
        c = np.asarray(c, dtype=complex)
        return cls(float(np.real(c0)), 2.0 * c.real, -2.0 * c.imag)

    @property
    def degree(self) -> int:
        nz = np.nonzero((self.cos != 0) | (self.sin != 0))[0]
        return int(nz[-1]) + 1 if nz.size else 0

    @property
    def modes(self) -> np.ndarray:
        return np.arange(1, self.cos.size + 1)

    def complex_coeffs(self) -> np.ndarray:
        return 0.5 * (self.cos - 1j * self.sin)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.constant)
        if self.cos.size == 0:
            return float(out) if out.ndim == 0 else out
        # a cos + b sin = Re((a - ib) e^{i arg}); powers of e^{2 pi i t} by
        # recurrence, re-anchored from frac(k t) every _ANCHOR modes
        coef = self.cos - 1j * self.sin
        flat = t.ravel()
        step = np.exp(1j * TWO_PI * wrap(flat))
        width = min(_ANCHOR, coef.size)
        pows = np.empty((width, flat.size), dtype=complex)
        pows[0] = 1.0
        for j in range(1, width):
            pows[j] = pows[j - 1] * step
        acc = np.zeros(flat.size, dtype=complex)
        for lo in range(0, coef.size, _ANCHOR):
            block = coef[lo : lo + _ANCHOR]
            if not block.any():
                continue
            anchor = np.exp(1j * TWO_PI * wrap((lo + 1) * flat))
            acc += (block @ pows[: block.size]) * anchor
        out = out + acc.real.reshape(t.shape)
        return float(out) if out.ndim == 0 else out

    def _binary(self, other, sign):
        if isinstance(other, (int, float)):
            return TrigPoly(self.constant + sign * other, self.cos, self.sin)
        n = max(self.cos.size, other.cos.size)
        pad = lambda v: np.pad(v, (0, n - v.size))
        return TrigPoly(
            self.constant + sign * other.constant,
            pad(self.cos) + sign * pad(other.cos),
            pad(self.sin) + sign * pad(other.sin),
        )

    def __add__(self, other):
        return self._binary(other, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, -1.0)

    def __neg__(self):
        return TrigPoly(-self.constant, -self.cos, -self.sin)

    def __mul__(self, c: float):
        return TrigPoly(c * self.constant, c * self.cos, c * self.sin)

    __rmul__ = __mul__

    def mean(self) -> float:
        return self.constant

    def mean_zero(self) -> "TrigPoly":
        return TrigPoly(0.0, self.cos, self.sin)

    def truncate(self, K: int) -> "TrigPoly":
        return TrigPoly(self.constant, self.cos[:K], self.sin[:K])

    def tail_bound(self, K: int) -> float:
        """Sup-norm of the modes above K."""
        return float(np.hypot(self.cos[K:], self.sin[K:]).sum())

    def shift(self, s: float) -> "TrigPoly":
        """The polynomial t -> p(t + s)."""
        if self.cos.size == 0:
            return self
        phase = TWO_PI * frac_multiple(s, self.modes)
        c, sn = np.cos(phase), np.sin(phase)
        return TrigPoly(self.constant, self.cos * c + self.sin * sn, self.sin * c - self.cos * sn)

    def reflect(self) -> "TrigPoly":
        """The polynomial t -> p(-t)."""
        return TrigPoly(self.constant, self.cos, -self.sin)

    def sup_bound(self) -> float:
        return abs(self.constant) + float(np.hypot(self.cos, self.sin).sum())

    def lipschitz(self) -> float:
        return TWO_PI * float((self.modes * np.hypot(self.cos, self.sin)).sum())

    def allclose(self, other: "TrigPoly", atol: float = 1e-12) -> bool:
        d = self - other
        return d.sup_bound() <= atol

    def to_json(self) -> dict:
        return {"constant": self.constant, "cos": self.cos.tolist(), "sin": self.sin.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "TrigPoly":
        return cls(data.get("constant", 0.0), data.get("cos", []), data.get("sin", []))

    def __repr__(self):
        return f"TrigPoly(constant={self.constant!r}, cos={self.cos.tolist()!r}, sin={self.sin.tolist()!r})"


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Samples of a Lipschitz function on the uniform grid i/N, i = 0..N-1.

    Off-grid values come from periodic linear interpolation, which keeps the
    declared Lipschitz constant valid.
    """

    values: np.ndarray
    lipschitz: float = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1).copy()
        if v.size < 4:
            raise ValueError("need at least 4 samples")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        observed = v.size * float(np.max(np.abs(np.diff(np.append(v, v[0])))))
        if self.lipschitz is None:
            object.__setattr__(self, "lipschitz", observed)
        elif observed > self.lipschitz * (1 + 1e-9) + 1e-12:
            raise ValueError(
                f"samples vary faster ({observed:.4g}) than the declared Lipschitz constant {self.lipschitz}"
            )

    @classmethod
    def from_callable(cls, fn, n: int = DEFAULT_GRID, lipschitz: float = None) -> "SampledFunction":
        return cls(fn(np.arange(n) / n), lipschitz)

    @property
    def n(self) -> int:
        return self.values.size

    def grid(self) -> np.ndarray:
        return np.arange(self.n) / self.n

    def __call__(self, t):
        t = wrap(np.asarray(t, dtype=float))
        out = np.interp(t, self.grid(), self.values, period=1.0)
        return float(out) if np.ndim(out) == 0 else out

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            return SampledFunction(self.values - other, self.lipschitz)
        other_vals = other(self.grid())
        lip = self.lipschitz + _lipschitz(other)
        return SampledFunction(self.values - other_vals, lip)

    def __neg__(self):
        return SampledFunction(-self.values, self.lipschitz)

    def mean(self) -> float:
        return float(self.values.mean())

    def reflect(self) -> "SampledFunction":
        idx = (-np.arange(self.n)) % self.n
        return SampledFunction(self.values[idx], self.lipschitz)

    def sup_bound(self) -> float:
        return float(np.max(np.abs(self.values)))

    def to_json(self) -> dict:
        return {"n": self.n, "lipschitz": self.lipschitz, "values": self.values.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "SampledFunction":
        values = data["values"]
        if "n" in data and len(values) != data["n"]:
            raise ValueError("sample count does not match n")
        return cls(values, data.get("lipschitz"))


Phase = Union[TrigPoly, SampledFunction]


def _lipschitz(f) -> float:
    return f.lipschitz() if isinstance(f, TrigPoly) else float(f.lipschitz)


def phase_lipschitz(f: Phase) -> float:
    return _lipschitz(f)


def phase_from_json(data: dict) -> Phase:
    if "values" in data:
        return SampledFunction.from_json(data)
    return TrigPoly.from_json(data)


@dataclass(frozen=True, eq=False)
class LiftedPoly:
    """y -> slope * y + poly(y): a real lift on a sub-arc of [0, 1)."""

    slope: float
    poly: TrigPoly

    def __call__(self, y):
        return self.slope * np.asarray(y, dtype=float) + self.poly(y)

    def lipschitz(self) -> float:
        return abs(self.slope) + self.poly.lipschitz()

    def to_json(self) -> dict:
        return {"slope": self.slope, "poly": self.poly.to_json()}


@dataclass(frozen=True, eq=False)
class CircleValuedMap:
    """xi -> xi^d exp(2 pi i phase(xi)), i.e. x -> d x + phase(x) mod 1."""

    degree: int
    phase: Phase = field(default_factory=TrigPoly.zero)

    def __post_init__(self):
        object.__setattr__(self, "degree", int(self.degree))

    def lift(self, x):
        x = np.asarray(x, dtype=float)
        return self.degree * x + self.phase(x)

    def __call__(self, x):
        return wrap(self.lift(x))

    def lipschitz(self) -> float:
        return abs(self.degree) + _lipschitz(self.phase)

    def inverse_multiplier(self) -> "CircleValuedMap":
        """The pointwise conjugate xi -> conj(g(xi))."""
        return CircleValuedMap(-self.degree, -self.phase)

    def samples(self, n: int = 1024) -> np.ndarray:
        return self(np.arange(n) / n)

    def to_json(self) -> dict:
        return {"degree": self.degree, "phase": self.phase.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "CircleValuedMap":
        return cls(data["degree"], phase_from_json(data["phase"]))


def eval_trig(p: TrigPoly, t):
    return p(t.value if hasattr(t, "value") else t)


def eval_circle_map(F: CircleValuedMap, xi):
    return F(xi.value if hasattr(xi, "value") else xi)


def fourier_coeffs(s: SampledFunction, K: int) -> TrigPoly:
    """Degree-K truncation of the discrete Fourier expansion of the samples."""
    if K < 1:
        raise ValueError("K must be positive")
    if 2 * K >= s.n:
        raise ValueError(f"K={K} violates the Nyquist bound K < N/2 = {s.n / 2}")
    X = np.fft.rfft(s.values) / s.n
    return TrigPoly(X[0].real, 2.0 * X[1 : K + 1].real, -2.0 * X[1 : K + 1].imag)


def jackson_tail_bound(lipschitz: float, K: int) -> float:
    """A priori sup-norm bound on f - S_K f for an L-Lipschitz f on R/Z.

    Jackson's theorem gives best-approximation error L/(4(K+1)); the partial
    sum loses at most the Lebesgue constant 4/pi^2 log K + 3 on top of that.
    """
    lebesgue = 4.0 / math.pi**2 * math.log(max(K, 1)) + 3.0
    return (1.0 + lebesgue) * lipschitz / (4.0 * (K + 1))
