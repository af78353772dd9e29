"""Cocycle constructions over an irrational rotation.

* ``build_omega``: tower-based smoothing of F - G into an almost-coboundary.
* ``solve_coboundary_exact``: Fourier solution of f = g - g(. + theta).
* ``approx_coboundary_with_winding``: f ~ g(. + theta) - g with g of degree k d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circle import Arc, circle_dist, circle_norm, frac_multiple, nearest_multiple, rotate, signed_wrap, wrap
from .errors import CertificationError, SmallDenominatorError, SubdivisionError, TruncationError
from .functions import (
    TWO_PI,
    CircleValuedMap,
    SampledFunction,
    TrigPoly,
    fourier_coeffs,
    phase_lipschitz,
)
from .rokhlin import RokhlinTower

DENOMINATOR_GUARD = 1e-13
MAX_MODES = 2**8
CERT_GRID = 2**14
MAX_SUBARCS = 2**10
OSC_SAMPLES = 32


def chord(u):
    """Chordal length of the R/Z displacement u."""
    return 2.0 * np.abs(np.sin(np.pi * np.asarray(u, dtype=float)))


def _denominators(theta: float, K: int) -> np.ndarray:
    m = np.arange(1, K + 1)
    w = np.exp(2j * np.pi * frac_multiple(theta, m))
    denom = 1.0 - w
    bad = np.nonzero(np.abs(denom) <= DENOMINATOR_GUARD)[0]
    if bad.size:
        i = int(bad[0])
        raise SmallDenominatorError(i + 1, float(abs(denom[i])), DENOMINATOR_GUARD)
    return denom


def as_trig(phase, max_modes: int = MAX_MODES) -> TrigPoly:
    """TrigPoly view of a phase; sampled phases go through the DFT."""
    if isinstance(phase, TrigPoly):
        return phase
    K = min(max_modes, phase.n // 2 - 1)
    return fourier_coeffs(phase, K)


# ---------------------------------------------------------------- pieces


@dataclass(frozen=True, eq=False)
class PiecewiseCircleMap:
    """Lift of an R/Z-valued map that is smooth on finitely many half-open arcs.

    On the arc [s, s + L) the lift is ``const + slope*(x - s) + trig(x)``
    where trig has coefficient rows ``cos[p]``, ``sin[p]``.  Arcs never wrap
    through 0 and are kept sorted by start.
    """

    starts: np.ndarray
    lengths: np.ndarray
    constants: np.ndarray
    slopes: np.ndarray = None
    cos: np.ndarray = None
    sin: np.ndarray = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        starts = np.asarray(self.starts, dtype=float).reshape(-1)
        P = starts.size
        order = np.argsort(starts, kind="stable")

        def rows(v, width=None):
            if v is None:
                return np.zeros((P, width)) if width is not None else np.zeros(P)
            return np.asarray(v, dtype=float)[order] if width is None else np.asarray(v, dtype=float).reshape(P, -1)[order]

        K = 0
        if self.cos is not None:
            K = np.asarray(self.cos).reshape(P, -1).shape[1]
        object.__setattr__(self, "starts", starts[order])
        object.__setattr__(self, "lengths", rows(self.lengths))
        object.__setattr__(self, "constants", rows(self.constants))
        object.__setattr__(self, "slopes", rows(self.slopes))
        object.__setattr__(self, "cos", rows(self.cos, K))
        object.__setattr__(self, "sin", rows(self.sin, K))

    @classmethod
    def zero(cls) -> "PiecewiseCircleMap":
        return cls([0.0], [1.0], [0.0])

    @property
    def n_pieces(self) -> int:
        return self.starts.size

    @property
    def arcs(self):
        return [Arc(s, l) for s, l in zip(self.starts, self.lengths)]

    def locate(self, x):
        x = wrap(np.asarray(x, dtype=float))
        idx = np.searchsorted(self.starts, x, side="right") - 1
        return np.where(idx < 0, self.n_pieces - 1, idx)

    def piece_value(self, idx, x):
        """Evaluate piece ``idx`` at x using that piece's own formula."""
        x = np.asarray(x, dtype=float)
        idx = np.asarray(idx)
        out = self.constants[idx] + self.slopes[idx] * (x - self.starts[idx])
        for k in range(self.cos.shape[1]):
            arg = TWO_PI * wrap((k + 1) * x)
            out = out + self.cos[idx, k] * np.cos(arg) + self.sin[idx, k] * np.sin(arg)
        return out

    def __call__(self, x):
        x = wrap(np.asarray(x, dtype=float))
        idx = self.locate(x)
        # offsets are measured along the arc so a piece ending at 1 is fine
        off = wrap(x - self.starts[idx])
        out = self.piece_value(idx, self.starts[idx] + off)
        return float(out) if np.ndim(out) == 0 else out

    def uncovered_length(self) -> float:
        ends = self.starts + self.lengths
        nxt = np.append(self.starts[1:], self.starts[0] + 1.0)
        return float(np.abs(nxt - ends).sum())

    def piece_lipschitz(self) -> np.ndarray:
        m = np.arange(1, self.cos.shape[1] + 1)
        return np.abs(self.slopes) + TWO_PI * (np.hypot(self.cos, self.sin) * m).sum(axis=1)

    def lipschitz(self) -> float:
        """Largest Lipschitz constant of a single piece (jumps excluded)."""
        return float(self.piece_lipschitz().max()) if self.n_pieces else 0.0

    def jumps(self) -> np.ndarray:
        """Signed R/Z jump at each piece start (right value minus left limit)."""
        prev = np.roll(np.arange(self.n_pieces), 1)
        left = self.piece_value(prev, self.starts[prev] + self.lengths[prev])
        right = self.piece_value(np.arange(self.n_pieces), self.starts)
        return signed_wrap(right - left)

    def discontinuities(self, tol: float = 1e-9) -> np.ndarray:
        return self.starts[np.abs(self.jumps()) > tol]

    def negate(self) -> "PiecewiseCircleMap":
        return PiecewiseCircleMap(
            self.starts, self.lengths, -self.constants, -self.slopes, -self.cos, -self.sin, dict(self.info)
        )

    def to_json(self) -> dict:
        return {
            "arcs": [{"start": float(s), "length": float(l)} for s, l in zip(self.starts, self.lengths)],
            "pieces": [
                {"constant": float(c), "slope": float(k), "cos": a.tolist(), "sin": b.tolist()}
                for c, k, a, b in zip(self.constants, self.slopes, self.cos, self.sin)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PiecewiseCircleMap":
        arcs, pieces = data["arcs"], data["pieces"]
        K = max((len(p["cos"]) for p in pieces), default=0)
        pad = lambda v: list(v) + [0.0] * (K - len(v))
        return cls(
            [a["start"] for a in arcs],
            [a["length"] for a in arcs],
            [p["constant"] for p in pieces],
            [p.get("slope", 0.0) for p in pieces],
            [pad(p["cos"]) for p in pieces],
            [pad(p["sin"]) for p in pieces],
        )


# ------------------------------------------------------------ kappa sums


def _difference(F: CircleValuedMap, G: CircleValuedMap):
    dD = F.degree - G.degree
    df = as_trig(F.phase) - as_trig(G.phase)
    return dD, df


def _orbit_offsets(theta: float, start: float, h: int) -> np.ndarray:
    """c_l = wrap(start + l theta) - start for l < h."""
    return rotate(start, theta, np.arange(h)) - start


@dataclass(frozen=True, eq=False)
class KappaColumn:
    """kappa(y) = sum_{l < h} [F - G](y + l theta) as a lift on one base arc."""

    arc: Arc
    height: int
    delta_degree: int
    poly: TrigPoly  # the trig part P_h(y), constant included
    offset_sum: float  # sum_l wrap(start + l theta) - start

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        u = self.arc.offset(y)
        lin = self.delta_degree * (self.height * (self.arc.start + u) + self.offset_sum)
        return lin + self.poly(y)

    def lipschitz(self) -> float:
        return abs(self.delta_degree) * self.height + self.poly.lipschitz()


def _sum_poly(df: TrigPoly, theta: float, h: int, denom: np.ndarray) -> TrigPoly:
    K = df.cos.size
    if K == 0:
        return TrigPoly(h * df.constant)
    m = np.arange(1, K + 1)
    wh = np.exp(2j * np.pi * frac_multiple(theta, m * h))
    c = df.complex_coeffs() * (1.0 - wh) / denom
    return TrigPoly.from_complex(h * df.constant, c)


def kappa_sums(tower: RokhlinTower, F: CircleValuedMap, G: CircleValuedMap):
    """One KappaColumn per base arc of the tower."""
    dD, df = _difference(F, G)
    denom = _denominators(tower.theta, df.cos.size)
    out = []
    for arc, h in tower.arcs:
        offsets = _orbit_offsets(tower.theta, arc.start, h)
        out.append(KappaColumn(arc, h, dD, _sum_poly(df, tower.theta, h, denom), float(offsets.sum())))
    return out


def _subdivide(col: KappaColumn):
    """Split the column's arc until kappa oscillates by less than 1 on each piece.

    Returns a list of (start, length, n, max |kappa - n|) with n the integer
    nearest the midrange of kappa.
    """
    lip = col.lipschitz()
    todo = [(col.arc.start, col.arc.length)]
    done = []
    while todo:
        if len(done) + len(todo) > MAX_SUBARCS:
            raise SubdivisionError(
                f"kappa needs more than {MAX_SUBARCS} sub-arcs on a height-{col.height} column; raise n"
            )
        a, L = todo.pop()
        y = a + L * np.arange(OSC_SAMPLES + 1) / OSC_SAMPLES
        vals = col(y)
        slack = lip * L / (2 * OSC_SAMPLES)
        lo, hi = vals.min() - slack, vals.max() + slack
        if hi - lo < 1.0:
            n = round(0.5 * (lo + hi))
            done.append((a, L, n, max(hi - n, n - lo)))
        else:
            todo.extend([(a + L / 2, L / 2), (a, L / 2)])
    done.sort()
    return done


def build_omega(tower: RokhlinTower, F: CircleValuedMap, G: CircleValuedMap) -> PiecewiseCircleMap:
    """Piecewise map omega with omega(x + theta) - omega(x) ~ F(x) - G(x).

    On level j of a column of height h over base point y,
    omega = S_j(y) - (j/h)(kappa(y) - n), S_j the partial orbit sum, which
    makes every level's defect equal to (kappa(y) - n)/h in R/Z.  omega is 0
    on the base.
    """
    if tower.min_height < 2:
        raise ValueError("tower heights must be at least 2")
    theta = tower.theta
    dD, df = _difference(F, G)
    K = df.cos.size
    denom = _denominators(theta, K)
    c = df.complex_coeffs()
    m = np.arange(1, K + 1)

    starts, lengths, consts, cos_rows, sin_rows = [], [], [], [], []
    worst_rz = 0.0
    n_sub = 0
    for col in kappa_sums(tower, F, G):
        h = col.height
        j = np.arange(h)
        frac_j = j / h
        if K:
            wj = np.exp(2j * np.pi * frac_multiple(theta, np.outer(j, m)))
            wh = np.exp(2j * np.pi * frac_multiple(theta, m * h))
            B = c * ((1.0 - wj) - frac_j[:, None] * (1.0 - wh)) * np.conj(wj) / denom
            level_cos, level_sin = 2.0 * B.real, -2.0 * B.imag
        else:
            level_cos = level_sin = np.zeros((h, 0))
        for a, L, n, kt in _subdivide(col):
            n_sub += 1
            worst_rz = max(worst_rz, kt / h)
            const = frac_j * n
            if dD:
                offs = _orbit_offsets(theta, a, h)
                C = np.concatenate(([0.0], np.cumsum(offs)[:-1]))
                C_h = offs.sum()
                const = const + dD * (C - frac_j * C_h)
            starts.append(rotate(a, theta, j))
            lengths.append(np.full(h, L))
            consts.append(wrap(const))
            cos_rows.append(level_cos)
            sin_rows.append(level_sin)

    info = {
        "defect_rz_bound": worst_rz,
        "defect_chord_bound": float(chord(min(worst_rz, 0.5))),
        "min_height": tower.min_height,
        "subarcs": n_sub,
    }
    return PiecewiseCircleMap(
        np.concatenate(starts),
        np.concatenate(lengths),
        np.concatenate(consts),
        None,
        np.concatenate(cos_rows),
        np.concatenate(sin_rows),
        info,
    )


# ------------------------------------------------------ Fourier solutions


def solve_coboundary_exact(f: TrigPoly, theta: float) -> TrigPoly:
    """g with f(t) = g(t) - g(t + theta), mode by mode."""
    if abs(f.constant) > 1e-12:
        raise ValueError("f must have zero mean; the constant mode is not a coboundary")
    K = f.cos.size
    if K == 0:
        return TrigPoly.zero()
    denom = _denominators(theta, K)
    return TrigPoly.from_complex(0.0, f.complex_coeffs() / denom)


@dataclass(frozen=True)
class CoboundaryCertificate:
    target: float
    achieved: float  # certified sup of |e^{2 pi i r} - 1|
    raw_sup: float
    inflation: float
    grid: int
    k: int
    d: int
    degree: int
    constant_error: float

    @property
    def winding(self) -> int:
        return self.k * self.d

    @property
    def ok(self) -> bool:
        return self.achieved < self.target

    def to_json(self) -> dict:
        return {
            "target": self.target,
            "achieved": self.achieved,
            "raw_sup": self.raw_sup,
            "inflation": self.inflation,
            "grid": self.grid,
            "k": self.k,
            "d": self.d,
            "winding": self.winding,
            "degree": self.degree,
            "constant_error": self.constant_error,
        }


def _truncate_sampled(f: SampledFunction, eps: float):
    K = 8
    limit = min(MAX_MODES, f.n // 2 - 1)
    grid = f.grid()
    while True:
        K = min(K, limit)
        p = fourier_coeffs(f, K)
        tail = float(np.max(np.abs(f.values - p(grid))))
        if TWO_PI * tail < eps / 4:
            return p
        if K >= limit:
            raise TruncationError(
                f"degree {K} leaves a tail of {tail:.3g}; eps/4 = {eps / 4:.3g} needs more modes",
                needed_degree=2 * K,
            )
        K *= 2


def _truncate_trig(f: TrigPoly, eps: float) -> TrigPoly:
    for K in range(min(f.cos.size, MAX_MODES) + 1):
        if TWO_PI * f.tail_bound(K) < eps / 4:
            return f.truncate(K)
    needed = next((K for K in range(f.cos.size + 1) if TWO_PI * f.tail_bound(K) < eps / 4), f.cos.size)
    raise TruncationError(f"needs degree {needed} > {MAX_MODES}", needed_degree=needed)


def approx_coboundary_with_winding(f, theta: float, d: int, eps: float, grid: int = CERT_GRID):
    """k, g0 such that g(x) = k d x + g0(x) satisfies f + g - g(. + theta) ~ 0.

    The constant part a of f is matched by k d theta to within eps/(4 pi) in
    R/Z, the rest is solved exactly after truncation; the result is then
    certified on a grid of ``grid`` points with a Lipschitz inflation.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if d == 0:
        raise ValueError("d must be nonzero")
    if isinstance(f, SampledFunction):
        p = _truncate_sampled(f, eps)
    else:
        p = _truncate_trig(f, eps)
    a = p.constant
    f0 = p.mean_zero()

    phi = (Fraction(theta) * d) % 1
    k = 0 if circle_norm(a) < eps / (4 * math.pi) else nearest_multiple(a, phi, eps / (4 * math.pi))
    g0 = solve_coboundary_exact(-f0, theta)

    x = np.arange(grid) / grid
    shift = frac_multiple(theta, k * d)
    residual = f(x) - shift + g0(x) - g0(rotate(x, theta))
    raw = float(np.max(chord(residual)))
    if isinstance(f, TrigPoly):
        lip = (f.mean_zero() + g0 - g0.shift(theta)).lipschitz()
    else:
        lip = phase_lipschitz(f) + 2 * g0.lipschitz()
    inflation = TWO_PI * lip * (1.0 / grid) / 2
    cert = CoboundaryCertificate(
        target=float(eps),
        achieved=raw + inflation,
        raw_sup=raw,
        inflation=inflation,
        grid=grid,
        k=int(k),
        d=int(d),
        degree=f0.degree,
        constant_error=float(circle_dist(a, shift)),
    )
    if not cert.ok:
        raise CertificationError(f"certified defect {cert.achieved:.3g} is not below eps={eps}")
    return int(k), g0, cert


def coboundary_map(k: int, d: int, g0: TrigPoly) -> CircleValuedMap:
    return CircleValuedMap(k * d, g0)


# ------------------------------------------------------------ trig sums


def sine_sum(theta: float, n: int, start: int = 1) -> float:
    """sum_{k=start}^{n} sin(k theta), theta in radians."""
    return float(np.sin(np.arange(start, n + 1) * theta).sum())


def cosine_sum(theta: float, n: int, start: int = 1) -> float:
    return float(np.cos(np.arange(start, n + 1) * theta).sum())


def shifted_sine_sum(theta: float, n: int, shift: float) -> float:
    """sum_{k=0}^{n} sin(shift + k theta)."""
    return float(np.sin(shift + np.arange(n + 1) * theta).sum())


def sine_sum_bound(theta: float) -> float:
    return 1.0 / abs(math.sin(theta / 2))


def shifted_sum_bound(theta: float) -> float:
    return 1.0 + 2.0 / abs(math.sin(theta / 2))
