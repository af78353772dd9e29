"""The K-theoretic invariant (theta up to sign, |d|) of a Furstenberg map.

For Phi_{theta,d,f} the crossed product has K_0 = Z^3 with tracial range
Z + Z theta and K_1 = Z + Z + Z/|d| + Z, so isomorphism reduces to comparing
theta mod +-1 and the torsion order |d|.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circle import circle_norm, wrap
from .furstenberg import FurstenbergMap


@dataclass(frozen=True)
class KInvariant:
    theta_class: float  # min(theta mod 1, -theta mod 1), in [0, 1/2]
    torsion: int
    k0_rank: int = 3

    def __post_init__(self):
        if self.torsion < 1:
            raise ValueError("torsion order must be at least 1")

    @property
    def k1_shape(self) -> str:
        if self.torsion == 1:
            return "Z + Z + Z"
        return f"Z + Z + Z/{self.torsion}Z + Z"

    @property
    def tracial_range(self) -> str:
        return f"Z + Z*{self.theta_class!r}"

    def to_json(self) -> dict:
        return {
            "theta_class": self.theta_class,
            "torsion": self.torsion,
            "k0_rank": self.k0_rank,
            "k1_shape": self.k1_shape,
        }


def theta_class(theta: float) -> float:
    t = wrap(theta)
    return min(t, wrap(-t))


def k_invariant(m: FurstenbergMap) -> KInvariant:
    return KInvariant(theta_class(m.theta), abs(m.d))


def isomorphic(i1: KInvariant, i2: KInvariant, tol: float = 1e-9) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(circle_norm(i1.theta_class - i2.theta_class) <= tol and i1.torsion == i2.torsion)
