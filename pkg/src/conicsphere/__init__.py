"""Numerical laboratory for constant sigma_2-curvature conic 4-spheres.

The package computes symmetric-function curvatures of conformally flat
metrics, classifies conic divisors, constructs the radial two-cone solutions
by ODE integration, and verifies the level-set identities and the monotone
quantity that govern existence.  See README.md for the derivations and the
CLI (``conicsphere``) for the command surface.
"""

from .conformal import (
    ConformalFactor,
    FiniteDifferenceConfig,
    divergence_residual,
    finite_difference_factor,
    round_sphere_factor,
    schouten_flat,
    sigma_k_curvature,
)
from .divisor import (
    Classification,
    ConicDivisor,
    beta_tilde,
    classify,
    defect,
    football_invariant,
    gbc_total,
    reflection_identity_gap,
)
from .levelset import (
    LevelSetSummary,
    RelationReport,
    gbc_from_profile,
    key_inequality_ratio,
    montecarlo_volume_check,
    relation_report,
    summary_at,
)
from .radial import (
    AsymptoticData,
    IntegrationError,
    RadialProfile,
    cylinder_rhs,
    first_integral,
    football_profile,
    measured_asymptotics,
    reconstruct_factor,
    sphere_profile,
)
from .symfunc import in_cone, newton_tensor, sigma_k, sigma_k_matrix, sphere_volume

__version__ = "0.1.0"
