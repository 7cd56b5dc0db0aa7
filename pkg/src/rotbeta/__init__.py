"""Rotational beta expansions ``T(z) = beta M z - d(z)`` modulo a lattice.

Invariant densities via Ulam's method, hole-radius tracking for preimage
sets, closed-form expansion thresholds, and checks of the inscribed-ball
bound for lines cutting a disk.
"""

from .bounds import applicable_theorems, b1, b2, bounds_table, c_theta
from .dynamics import (
    RotBetaMap,
    check_property_s,
    check_slab_condition,
    hole_radii,
    preimage_tree,
    reflection,
    rotation,
)
from .geometry import (
    LatticeDomain,
    Strip,
    covering_radius,
    dist_to_domain_complement,
    largest_empty_ball,
    width,
)
from .plank import LineConfig, bang_cover_check, max_inscribed_radius, verify_cut_bound
from .specs import load_map, map_from_dict
from .transfer import (
    build_ulam,
    ergodic_components,
    lebesgue_equivalence_check,
    stationary,
)

__version__ = "0.1.0"
