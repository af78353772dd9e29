"""Approximate and exact conjugacies between Furstenberg skew products on the 2-torus."""

from .circle import (
    Arc,
    CirclePoint,
    RationalApprox,
    TorusPoint,
    circle_dist,
    convergents,
    torus_dist,
    winding_number,
    wrap,
)
from .functions import CircleValuedMap, LiftedPoly, SampledFunction, TrigPoly, fourier_coeffs
from .furstenberg import FurstenbergMap, birkhoff_average, flip_base, flip_fiber
from .rokhlin import RokhlinTower, build_tower, first_return
from .cocycle import (
    CoboundaryCertificate,
    PiecewiseCircleMap,
    approx_coboundary_with_winding,
    build_omega,
    kappa_sums,
    solve_coboundary_exact,
)
from .maps import Composition, ShearMap
from .verify import DefectReport, measure_defect_profile, measure_preservation, sup_defect
from .conjugacy import (
    ConjugacyResult,
    ObstructionReport,
    build_exact_conjugacy,
    build_k_conjugacy_sequence,
    build_m1_conjugacy,
    build_m2_conjugacy,
    check_obstructions,
)
from .ktheory import KInvariant, isomorphic, k_invariant

__version__ = "0.1.0"
