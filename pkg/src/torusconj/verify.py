"""Certification harness for candidate conjugacies.

The defect of sigma at p is dist(sigma(alpha(p)), beta(sigma(p))).  For
fiber maps between skew products over (nearly) the same rotation this does
not depend on t, so the sup is taken over a fine x sweep that is cut at
every place where the integrand can jump; a Lipschitz bound per smooth
interval then turns the sampled max into a bound on the true sup.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import beta as beta_dist

from .circle import circle_dist, rotate, torus_dist, wrap
from .cocycle import chord
from .functions import TWO_PI, TrigPoly, phase_lipschitz
from .furstenberg import FurstenbergMap, flip_base, flip_fiber
from .maps import Composition, ShearMap

CHUNK = 1 << 18
DEFAULT_SEED = 20240611


@dataclass(frozen=True)
class ProfilePoint:
    threshold: float
    estimate: float
    error: float  # one-sided upper confidence bound minus estimate
    upper: float

    def to_json(self) -> dict:
        return {"threshold": self.threshold, "estimate": self.estimate, "error": self.error, "upper": self.upper}


@dataclass(frozen=True)
class DefectReport:
    grid: int
    raw_sup: float
    inflation: float
    certified_sup: float
    method: str
    samples: int
    lipschitz: float
    certified: bool = True
    profile: tuple = ()
    seed: int = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "grid": self.grid,
            "raw_sup": self.raw_sup,
            "inflation": self.inflation,
            "certified_sup": self.certified_sup,
            "certified": self.certified,
            "method": self.method,
            "samples": self.samples,
            "lipschitz": self.lipschitz,
            "profile": [p.to_json() for p in self.profile],
            "seed": self.seed,
            **self.extra,
        }


def pointwise_defect(sigma, alpha, beta, x, t):
    lhs = sigma(*alpha(x, t))
    rhs = beta(*sigma(x, t))
    return torus_dist(lhs, rhs)


def _split(sigma):
    """(leading flips, core) when sigma is a fiber map possibly preceded by flips."""
    if isinstance(sigma, ShearMap):
        return (), sigma
    flips, core = sigma.flips, sigma.core
    if all(s.kind in ("base-flip", "fiber-flip") for s in flips):
        return flips, core
    return None, None


def _conjugate_through(alpha: FurstenbergMap, flips) -> FurstenbergMap:
    for s in flips:
        alpha = flip_base(alpha)[0] if s.kind == "base-flip" else flip_fiber(alpha)[0]
    return alpha


def _phase_difference_lipschitz(fa, fb, payload=None, theta=None) -> float:
    if isinstance(fa, TrigPoly) and isinstance(fb, TrigPoly):
        diff = fa - fb
        if payload is not None and isinstance(payload.phase, TrigPoly):
            g0 = payload.phase
            return (diff + g0.shift(theta) - g0).lipschitz()
        extra = 0.0 if payload is None else 2 * phase_lipschitz(payload.phase)
        return diff.lipschitz() + extra
    extra = 0.0 if payload is None else 2 * phase_lipschitz(payload.phase)
    return phase_lipschitz(fa) + phase_lipschitz(fb) + extra


def _sweep_points(breaks: np.ndarray, M: int):
    """Half-offset samples of every interval between consecutive breakpoints."""
    b = np.unique(wrap(np.concatenate((breaks, [0.0]))))
    lo = b
    hi = np.append(b[1:], 1.0)
    length = hi - lo
    keep = length > 0
    lo, length = lo[keep], length[keep]
    k = np.maximum(1, np.ceil(length * M).astype(np.int64))
    idx = np.repeat(np.arange(lo.size), k)
    starts = np.cumsum(k) - k
    pos = np.arange(idx.size) - starts[idx]
    step = length / k
    x = lo[idx] + (pos + 0.5) * step[idx]
    return x, float(step.max())


def _fiber_sweep(core: ShearMap, alpha: FurstenbergMap, beta: FurstenbergMap, grid: int):
    M = grid * grid
    theta = alpha.theta
    if core.kind == "fiber-shear":
        starts = core.payload.starts
        breaks = np.concatenate((starts, wrap(starts - theta), [wrap(-theta)]))
    else:
        breaks = np.array([wrap(-theta)])
    x, mesh = _sweep_points(breaks, M)
    base_err = circle_dist(alpha.theta, beta.theta)
    worst = 0.0
    for lo in range(0, x.size, CHUNK):
        xs = x[lo : lo + CHUNK]
        D = alpha.cocycle_lift(xs) + core.offset(rotate(xs, theta)) - core.offset(xs) - beta.cocycle_lift(xs)
        worst = max(worst, float(np.max(np.hypot(base_err, chord(D)))))
    if core.kind == "fiber-shear":
        lip = abs(alpha.d - beta.d) + _phase_difference_lipschitz(alpha.f, beta.f) + 2 * core.payload.lipschitz()
    else:
        lip = abs(alpha.d - beta.d) + _phase_difference_lipschitz(alpha.f, beta.f, core.payload, theta)
    inflation = TWO_PI * lip * mesh / 2
    return worst, inflation, lip, x.size


def _grid_sweep(sigma, alpha, beta, grid: int):
    g = (np.arange(grid) + 0.5) / grid
    worst = 0.0
    for i in range(0, grid, max(1, CHUNK // grid)):
        X, T = np.meshgrid(g[i : i + max(1, CHUNK // grid)], g, indexing="ij")
        worst = max(worst, float(np.max(pointwise_defect(sigma, alpha, beta, X.ravel(), T.ravel()))))
    lip_sigma = 1.0 + (sigma.core.lipschitz() if isinstance(sigma, Composition) else sigma.lipschitz())
    lip = lip_sigma * alpha.lipschitz() + beta.lipschitz() * lip_sigma
    mesh = math.sqrt(2) / grid
    return worst, TWO_PI * lip * mesh / 2, lip, grid * grid


def sup_defect(sigma, alpha: FurstenbergMap, beta: FurstenbergMap, grid: int = 512) -> DefectReport:
    """Certified bound on sup_p dist(sigma(alpha(p)), beta(sigma(p)))."""
    if grid < 64:
        raise ValueError("grid must be at least 64 per axis")
    flips, core = _split(sigma)
    if core is not None and core.is_fiber:
        alpha_core = _conjugate_through(alpha, flips)
        raw, infl, lip, n = _fiber_sweep(core, alpha_core, beta, grid)
        # cross-check the full composite on a coarse torus grid
        g = (np.arange(64) + 0.5) / 64
        X, T = np.meshgrid(g, g, indexing="ij")
        composite = float(np.max(pointwise_defect(sigma, alpha, beta, X.ravel(), T.ravel())))
        certified = max(raw + infl, composite)
        return DefectReport(
            grid, max(raw, composite), infl, certified, "fiber-sweep", n, lip,
            extra={"composite_raw": composite, "core_raw": raw},
        )
    has_jumps = bool(np.size(sigma.breakpoints()))
    raw, infl, lip, n = _grid_sweep(sigma, alpha, beta, grid)
    return DefectReport(grid, raw, infl, raw + infl, "grid-2d", n, lip, certified=not has_jumps)


def measure_preservation(sigma, cells: int = 256, sub: int = 8) -> float:
    """Max relative deviation of pushed-forward cell counts from uniform.

    A stratified sample with ``sub`` x ``sub`` points per cell is pushed
    through sigma and binned back into cells x cells.
    """
    if cells < 32:
        raise ValueError("need at least 32 cells per axis")
    S = cells * sub
    g = (np.arange(S) + 0.5) / S
    counts = np.zeros(cells * cells, dtype=np.int64)
    rows = max(1, CHUNK // S)
    for i in range(0, S, rows):
        X, T = np.meshgrid(g[i : i + rows], g, indexing="ij")
        x, t = sigma(X.ravel(), T.ravel())
        ci = np.minimum((np.asarray(x) * cells).astype(np.int64), cells - 1)
        cj = np.minimum((np.asarray(t) * cells).astype(np.int64), cells - 1)
        counts += np.bincount(ci * cells + cj, minlength=cells * cells)
    expected = sub * sub
    return float(np.max(np.abs(counts - expected)) / expected)


def clopper_pearson_upper(k: int, n: int, confidence: float = 0.99) -> float:
    if k >= n:
        return 1.0
    return float(beta_dist.ppf(confidence, k + 1, n - k))


def measure_defect_profile(
    sigma, alpha, beta, thresholds, samples: int = 10**4, seed: int = DEFAULT_SEED, confidence: float = 0.99
):
    """Monte-Carlo estimates of m2{p : defect(p) >= a} with one-sided CP bounds."""
    if samples < 10**4:
        raise ValueError("need at least 10^4 samples")
    rng = np.random.default_rng(seed)
    thresholds = np.asarray(sorted(thresholds), dtype=float)
    hits = np.zeros(thresholds.size, dtype=np.int64)
    done = 0
    while done < samples:
        k = min(CHUNK, samples - done)
        x, t = rng.random(k), rng.random(k)
        dfc = pointwise_defect(sigma, alpha, beta, x, t)
        hits += (dfc[None, :] >= thresholds[:, None]).sum(axis=1)
        done += k
    out = []
    for a, h in zip(thresholds, hits):
        est = h / samples
        up = clopper_pearson_upper(int(h), samples, confidence)
        out.append(ProfilePoint(float(a), float(est), float(up - est), up))
    return out


def profile_to_csv(profile, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["threshold", "estimate", "error", "upper"])
    for p in profile:
        w.writerow([repr(p.threshold), repr(p.estimate), repr(p.error), repr(p.upper)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
