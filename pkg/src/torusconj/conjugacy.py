"""Builders for approximate and exact conjugacies, and the obstruction checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circle import circle_dist, circle_norm, frac_multiple, signed_wrap, torus_dist, wrap
from .cocycle import (
    PiecewiseCircleMap,
    approx_coboundary_with_winding,
    build_omega,
    chord,
    solve_coboundary_exact,
)
from .errors import NotInV1Error, NumericalError, ObstructionError
from .functions import CircleValuedMap, SampledFunction, TrigPoly
from .furstenberg import FurstenbergMap, flip_base, flip_fiber
from .maps import Composition, ShearMap
from .rokhlin import build_tower
from .verify import DefectReport, measure_defect_profile, sup_defect

ROTATION_TOL = 1e-9
LATTICE_TOL = 1e-9
LATTICE_RANGE = 1000
MAX_TOWER_N = 20000


@dataclass(frozen=True)
class ObstructionReport:
    rotation_gap_a: float  # |e^{2 pi i (theta1 - theta2)} - 1|
    rotation_gap_b: float  # |e^{2 pi i (theta1 + theta2)} - 1|
    rotation_compatible: bool
    rotation_sign: int  # +1 when theta1 ~ theta2, -1 when theta1 ~ -theta2, 0 otherwise
    winding_verdict: str
    d1: int
    d2: int
    winding_sums: tuple
    slice_candidates: int = 0
    slice_min_defect: float = float("nan")
    slice_bound: float = float("nan")

    @property
    def compatible(self) -> bool:
        return self.rotation_compatible and self.winding_verdict == "compatible"

    @property
    def slice_passed(self) -> bool:
        return self.slice_candidates == 0 or self.slice_min_defect >= self.slice_bound - 1e-6

    def to_json(self) -> dict:
        return {
            "rotation_gap_a": self.rotation_gap_a,
            "rotation_gap_b": self.rotation_gap_b,
            "rotation_compatible": self.rotation_compatible,
            "rotation_sign": self.rotation_sign,
            "winding_verdict": self.winding_verdict,
            "d1": self.d1,
            "d2": self.d2,
            "winding_sums": list(self.winding_sums),
            "slice_candidates": self.slice_candidates,
            "slice_min_defect": self.slice_min_defect,
            "slice_bound": self.slice_bound,
            "compatible": self.compatible,
        }


@dataclass(frozen=True, eq=False)
class ConjugacyResult:
    map: object  # ShearMap or Composition
    sup_defect: float
    report: DefectReport
    mode: str
    eps: float = None
    profile: tuple = ()
    discontinuity_measure: float = 0.0
    discontinuities: tuple = ()
    extra: dict = field(default_factory=dict)

    def to_json(self, include_map: bool = True) -> dict:
        out = {
            "mode": self.mode,
            "eps": self.eps,
            "sup_defect": self.sup_defect,
            "report": self.report.to_json(),
            "profile": [p.to_json() for p in self.profile],
            "discontinuity_measure": self.discontinuity_measure,
            "discontinuities": [float(b) for b in self.discontinuities],
            **self.extra,
        }
        if include_map:
            out["map"] = self.map.to_json()
        return out


# ------------------------------------------------------------ obstructions


def _random_candidate(rng):
    degree = int(rng.integers(-2, 3))
    K = int(rng.integers(0, 5))
    phase = TrigPoly(rng.normal(), rng.normal(scale=0.3, size=K), rng.normal(scale=0.3, size=K))
    return int(rng.choice([-1, 1])), CircleValuedMap(degree, phase)


def _slice_experiment(theta1, theta2, candidates, seed, points=256):
    """Defect on the slice x = 0 of product-form maps between the reduced systems.

    The reduced systems are (x, t) -> (x + theta_i, t + x); a candidate is
    (x, t) -> (s x + g1(t), t) with s = +-1 and g1 circle valued.
    """
    rng = np.random.default_rng(seed)
    alpha = FurstenbergMap(theta1, 1)
    beta = FurstenbergMap(theta2, 1)
    t = (np.arange(points) + 0.5) / points
    x = np.zeros_like(t)
    worst = math.inf
    for _ in range(candidates):
        sign, g1 = _random_candidate(rng)

        def sigma(x, t, sign=sign, g1=g1):
            return wrap(sign * x + g1.lift(t)), wrap(t)

        lhs = sigma(*alpha(x, t))
        rhs = beta(*sigma(x, t))
        worst = min(worst, float(np.min(torus_dist(lhs, rhs))))
    return worst


def check_obstructions(alpha: FurstenbergMap, beta: FurstenbergMap, candidates: int = 1000, seed: int = 0):
    a = circle_dist(alpha.theta, beta.theta)
    b = circle_dist(alpha.theta, -beta.theta)
    if circle_norm(alpha.theta - beta.theta) <= ROTATION_TOL:
        sign = 1
    elif circle_norm(alpha.theta + beta.theta) <= ROTATION_TOL:
        sign = -1
    else:
        sign = 0
    d1, d2 = alpha.d, beta.d
    sums = (d1 + d2, d1 - d2, -d1 + d2, -d1 - d2)
    verdict = "compatible" if abs(d1) == abs(d2) else "incompatible"
    slice_min = _slice_experiment(alpha.theta, beta.theta, candidates, seed) if candidates else float("nan")
    return ObstructionReport(
        rotation_gap_a=float(a),
        rotation_gap_b=float(b),
        rotation_compatible=sign != 0,
        rotation_sign=sign,
        winding_verdict=verdict,
        d1=d1,
        d2=d2,
        winding_sums=sums,
        slice_candidates=candidates,
        slice_min_defect=slice_min,
        slice_bound=float(min(a, b)),
    )


def _require_rotation(alpha, beta):
    rep = check_obstructions(alpha, beta, candidates=0)
    if not rep.rotation_compatible:
        raise ObstructionError(
            f"rotation numbers differ: a={rep.rotation_gap_a:.3g}, b={rep.rotation_gap_b:.3g}", rep
        )
    return rep


# ------------------------------------------------------------ M2 and M1


def _normalize_base(alpha, beta, rep):
    """Base flip of alpha when its rotation is -theta_beta."""
    if rep.rotation_sign == -1:
        flipped, _ = flip_base(alpha)
        return flipped, (ShearMap("base-flip"),)
    return alpha, ()


def _wrap_map(flips, core):
    return Composition(flips + (core,)) if flips else core


def _omega_for(alpha_n, beta, n):
    tower = build_tower(beta.theta, n)
    F = CircleValuedMap(beta.d, beta.f)
    G = CircleValuedMap(alpha_n.d, alpha_n.f)
    return tower, build_omega(tower, F, G)


def build_m2_conjugacy(alpha: FurstenbergMap, beta: FurstenbergMap, eps: float, grid: int = 512, n: int = None):
    """Piecewise-continuous fiber shear sigma with sup defect <= eps.

    The tower height starts at 1/eps and is raised until both the
    construction bound and the independent certificate are below eps.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    rep = _require_rotation(alpha, beta)
    alpha_n, flips = _normalize_base(alpha, beta, rep)
    n = n or math.ceil(1.0 / eps) + 1
    while True:
        if n > MAX_TOWER_N:
            raise NumericalError(f"tower height {n} needed for eps={eps} exceeds the cap {MAX_TOWER_N}")
        tower, omega = _omega_for(alpha_n, beta, n)
        bound = omega.info["defect_chord_bound"]
        if bound >= eps:
            n = max(2 * n, math.ceil(n * bound / (0.8 * eps)))
            continue
        sigma = _wrap_map(flips, ShearMap("fiber-shear", omega))
        report = sup_defect(sigma, alpha, beta, grid)
        if report.certified_sup <= eps:
            break
        n *= 2
    jumps = omega.discontinuities()
    disc = sigma.breakpoints() if isinstance(sigma, Composition) else jumps
    return ConjugacyResult(
        sigma,
        report.certified_sup,
        report,
        "m2",
        eps,
        discontinuity_measure=0.0,
        discontinuities=tuple(float(b) for b in disc),
        extra={
            "tower_n": n,
            "min_height": tower.min_height,
            "pieces": omega.n_pieces,
            "construction_bound": bound,
            "vertical_circles": int(len(disc)),
        },
    )


def _bridge(omega: PiecewiseCircleMap, eps: float):
    """Continuous version of omega: linear bridges over small gaps around the jumps."""
    B = omega.starts
    r = min(eps / (8 * B.size), 0.25 * float(omega.lengths.min()))
    n = omega.n_pieces
    nxt = (np.arange(n) + 1) % n
    # values of each piece at its trimmed endpoints
    left_val = omega.piece_value(np.arange(n), omega.starts + r)
    right_val = omega.piece_value(np.arange(n), omega.starts + omega.lengths - r)

    starts = list(omega.starts + r)
    lengths = list(omega.lengths - 2 * r)
    consts = list(omega.constants + omega.slopes * r)
    slopes = list(omega.slopes)
    K = omega.cos.shape[1]
    cos = list(omega.cos)
    sin = list(omega.sin)
    zero = np.zeros(K)
    total_increment = float(np.sum(right_val - left_val))
    for i in range(n):
        j = nxt[i]
        lo = omega.starts[i] + omega.lengths[i] - r  # bridge from piece i to piece j
        v0 = right_val[i]
        step = signed_wrap(left_val[j] - v0)
        total_increment += step
        slope = step / (2 * r)
        if lo + 2 * r <= 1.0 + 1e-15:
            segs = [(lo, 2 * r, v0)]
        else:
            cut = 1.0 - lo
            segs = [(lo, cut, v0), (0.0, 2 * r - cut, v0 + slope * cut)]
        for s, L, v in segs:
            # the trig columns are zero, so the constant is the lift at s
            starts.append(wrap(s))
            lengths.append(L)
            consts.append(v)
            slopes.append(slope)
            cos.append(zero)
            sin.append(zero)
    winding = round(total_increment)
    bridged = PiecewiseCircleMap(
        np.array(starts), np.array(lengths), np.array(consts), np.array(slopes), np.array(cos), np.array(sin),
        {"gap_radius": r, "winding": int(winding), "gap_measure": 2 * r * n},
    )
    return bridged, r, B


def build_m1_conjugacy(
    alpha: FurstenbergMap,
    beta: FurstenbergMap,
    eps: float,
    grid: int = 512,
    samples: int = 10**5,
    seed: int = 0,
    thresholds=None,
):
    """Globally continuous shear whose defect exceeds eps on a set of measure < eps."""
    m2 = build_m2_conjugacy(alpha, beta, eps / 2, grid)
    core = m2.map.core if isinstance(m2.map, Composition) else m2.map
    flips = m2.map.flips if isinstance(m2.map, Composition) else ()
    bridged, r, B = _bridge(core.payload, eps)
    jumps = bridged.jumps()
    if np.max(np.abs(jumps)) > 1e-9:
        raise NumericalError(f"bridged shear still jumps by {np.max(np.abs(jumps)):.3g}")
    sigma = _wrap_map(flips, ShearMap("fiber-shear", bridged))
    thresholds = sorted(set(thresholds or [eps / 4, eps / 2, eps, 2 * eps]))
    profile = measure_defect_profile(sigma, alpha, beta, thresholds, samples, seed)
    # G and its theta-preimage: where the bridged map can differ from the M2 one
    bad = min(1.0, 2 * bridged.info["gap_measure"])
    report = sup_defect(sigma, alpha, beta, grid)
    return ConjugacyResult(
        sigma,
        report.certified_sup,
        report,
        "m1",
        eps,
        profile=tuple(profile),
        discontinuity_measure=bad,
        discontinuities=(),
        extra={
            "gap_radius": r,
            "gap_count": int(B.size),
            "winding": bridged.info["winding"],
            "max_jump": float(np.max(np.abs(jumps))),
            "m2_sup_defect": m2.sup_defect,
            "samples": samples,
            "seed": seed,
        },
    )


# ------------------------------------------------------------ exact


def _lattice_index(c: float, theta: float, bound: int = LATTICE_RANGE, tol: float = LATTICE_TOL):
    """Integer m with c = m theta mod 1 (smallest |m| first), or None."""
    m = np.arange(-bound, bound + 1)
    m = m[np.argsort(np.abs(m), kind="stable")]
    err = circle_norm(c - frac_multiple(theta, m))
    hit = np.nonzero(err <= tol)[0]
    return int(m[hit[0]]) if hit.size else None


def build_exact_conjugacy(
    alpha: FurstenbergMap, beta: FurstenbergMap, grid: int = 512, eps_fallback: float = 1e-6
):
    """sigma(x, t) = (x, t + k d x + g0(x)) conjugating alpha to beta exactly.

    Needs f1 - f2 = m1 theta + m2 + trig terms; then k d = -m1 and g0 solves
    the trig part.  When d does not divide m1 the constant is matched to
    within eps_fallback instead and the result is flagged ``exact=False``.
    """
    if circle_norm(alpha.theta - beta.theta) > ROTATION_TOL or alpha.d != beta.d:
        raise ValueError("exact conjugacy needs the same theta and d")
    if not (isinstance(alpha.f, TrigPoly) and isinstance(beta.f, TrigPoly)):
        raise NotInV1Error("f1 - f2 is not a trigonometric polynomial")
    theta, d = beta.theta, beta.d
    diff = alpha.f - beta.f
    m1 = _lattice_index(diff.constant, theta)
    if m1 is None:
        raise NotInV1Error(
            f"mean of f1 - f2 ({diff.constant!r}) is not on the lattice Z theta + Z; try build_m2_conjugacy"
        )
    exact = m1 % d == 0
    if exact:
        k = -m1 // d
        g0 = solve_coboundary_exact(diff.mean_zero(), theta)
    else:
        k, g0, _ = approx_coboundary_with_winding(beta.f - alpha.f, theta, d, eps_fallback)
    sigma = ShearMap("fiber-multiplier", CircleValuedMap(k * d, g0))
    report = sup_defect(sigma, alpha, beta, grid)
    return ConjugacyResult(
        sigma,
        report.certified_sup,
        report,
        "exact",
        None if exact else eps_fallback,
        extra={"k": int(k), "d": int(d), "m1": int(m1), "winding": int(k * d), "exact": bool(exact)},
    )


# ------------------------------------------------------------ K-conjugacy


def build_k_conjugacy_sequence(alpha: FurstenbergMap, beta: FurstenbergMap, eps_schedule, grid: int = 512):
    """Fiber-multiplier conjugacies, one per eps, after flip normalization."""
    schedule = list(eps_schedule)
    if any(b > a for a, b in zip(schedule, schedule[1:])):
        raise ValueError("eps_schedule must be nonincreasing")
    rep = check_obstructions(alpha, beta, candidates=0)
    if not rep.compatible:
        raise ObstructionError(
            f"no approximate K-conjugacy: rotation {'ok' if rep.rotation_compatible else 'mismatch'}, "
            f"winding {rep.winding_verdict}",
            rep,
        )
    alpha_n, flips = _normalize_base(alpha, beta, rep)
    if alpha_n.d != beta.d:
        alpha_n, _ = flip_fiber(alpha_n)
        flips = flips + (ShearMap("fiber-flip"),)
    theta, d = beta.theta, beta.d
    if isinstance(beta.f, TrigPoly) and isinstance(alpha_n.f, TrigPoly):
        f = beta.f - alpha_n.f
    else:
        f = _sampled_difference(beta.f, alpha_n.f)
    out = []
    for eps in schedule:
        target = eps
        for _ in range(4):
            k, g0, cert = approx_coboundary_with_winding(f, theta, d, 0.5 * target)
            sigma = _wrap_map(flips, ShearMap("fiber-multiplier", CircleValuedMap(k * d, g0)))
            report = sup_defect(sigma, alpha, beta, grid)
            if report.certified_sup <= eps:
                break
            target /= 4
        else:
            raise NumericalError(f"could not certify eps={eps}")
        out.append(
            ConjugacyResult(
                sigma,
                report.certified_sup,
                report,
                "kseq",
                eps,
                extra={
                    "k": int(k),
                    "d": int(d),
                    "winding": int(k * d),
                    "homotopy_matrix": [[1, int(k * d)], [0, 1]],
                    "flips": [s.kind for s in flips],
                    "certificate": cert.to_json(),
                },
            )
        )
    return out


def _sampled_difference(fb, fa):
    sampled = fb if isinstance(fb, SampledFunction) else fa
    grid = sampled.grid()
    return SampledFunction(fb(grid) - fa(grid))
