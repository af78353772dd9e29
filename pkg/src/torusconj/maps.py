"""Measure-preserving torus maps used as conjugacies: fiber shears and flips."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circle import TorusPoint, wrap
from .cocycle import PiecewiseCircleMap
from .functions import CircleValuedMap, TrigPoly, phase_lipschitz

KINDS = ("fiber-shear", "fiber-multiplier", "base-flip", "fiber-flip")


@dataclass(frozen=True, eq=False)
class ShearMap:
    """(x, t) -> (x, t + s(x)) for the two fiber kinds, or a coordinate flip.

    ``fiber-shear`` carries a PiecewiseCircleMap, ``fiber-multiplier`` a
    CircleValuedMap; the flips carry nothing.
    """

    kind: str
    payload: object = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown shear kind {self.kind!r}")
        if self.kind == "fiber-shear" and not isinstance(self.payload, PiecewiseCircleMap):
            raise TypeError("fiber-shear needs a PiecewiseCircleMap")
        if self.kind == "fiber-multiplier" and not isinstance(self.payload, CircleValuedMap):
            raise TypeError("fiber-multiplier needs a CircleValuedMap")

    @classmethod
    def identity(cls) -> "ShearMap":
        return cls("fiber-multiplier", CircleValuedMap(0, TrigPoly.zero()))

    @property
    def is_fiber(self) -> bool:
        return self.kind in ("fiber-shear", "fiber-multiplier")

    def offset(self, x):
        """Fiber translation s(x) as a real lift (fiber kinds only)."""
        if self.kind == "fiber-shear":
            return self.payload(x)
        return self.payload.lift(wrap(np.asarray(x, dtype=float)))

    def __call__(self, x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        if self.kind == "base-flip":
            return wrap(-x), wrap(t)
        if self.kind == "fiber-flip":
            return wrap(x), wrap(-t)
        return wrap(x), wrap(t + self.offset(x))

    def apply(self, p: TorusPoint) -> TorusPoint:
        return TorusPoint.of(*self(*p))

    def inverse(self) -> "ShearMap":
        if self.kind == "fiber-shear":
            return ShearMap(self.kind, self.payload.negate())
        if self.kind == "fiber-multiplier":
            return ShearMap(self.kind, self.payload.inverse_multiplier())
        return self

    def lipschitz(self) -> float:
        """Lipschitz bound of the fiber offset in lifted coordinates (pieces only)."""
        if self.kind == "fiber-shear":
            return self.payload.lipschitz()
        if self.kind == "fiber-multiplier":
            return abs(self.payload.degree) + phase_lipschitz(self.payload.phase)
        return 0.0

    def breakpoints(self) -> np.ndarray:
        """x-coordinates of the vertical circles where the map may jump."""
        if self.kind == "fiber-shear":
            return self.payload.discontinuities()
        return np.zeros(0)

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        if self.payload is not None:
            out["payload"] = self.payload.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "ShearMap":
        kind = data["kind"]
        if kind == "fiber-shear":
            return cls(kind, PiecewiseCircleMap.from_json(data["payload"]))
        if kind == "fiber-multiplier":
            return cls(kind, CircleValuedMap.from_json(data["payload"]))
        return cls(kind)


@dataclass(frozen=True, eq=False)
class Composition:
    """Maps applied in order: steps[0] first, steps[-1] last."""

    steps: tuple

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __call__(self, x, t):
        for s in self.steps:
            x, t = s(x, t)
        return x, t

    def apply(self, p: TorusPoint) -> TorusPoint:
        return TorusPoint.of(*self(*p))

    def inverse(self) -> "Composition":
        return Composition(tuple(s.inverse() for s in reversed(self.steps)))

    @property
    def core(self) -> ShearMap:
        return self.steps[-1]

    @property
    def flips(self) -> tuple:
        return self.steps[:-1]

    def breakpoints(self) -> np.ndarray:
        """Jump circles of the core, pulled back through the leading flips."""
        pts = self.core.breakpoints()
        n_base = sum(1 for s in self.flips if s.kind == "base-flip")
        return np.sort(wrap(-pts)) if n_base % 2 else pts

    def to_json(self) -> dict:
        return {"kind": "composition", "steps": [s.to_json() for s in self.steps]}

    @classmethod
    def from_json(cls, data: dict) -> "Composition":
        return cls(tuple(ShearMap.from_json(s) for s in data["steps"]))


def map_from_json(data: dict):
    if data.get("kind") == "composition":
        return Composition.from_json(data)
    return ShearMap.from_json(data)
