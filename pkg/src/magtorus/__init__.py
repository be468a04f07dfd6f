"""Spectral invariants of a magnetic Schrodinger operator on a flat 2-D torus.

The library computes, for a periodic magnetic field B and electric
potential V, a family of directional invariants (F_k, G_k) indexed by
primitive dual-lattice directions, together with independent 2-D
quadrature cross-checks, and reconstructs B and V from those invariants
by inverting a monotone circle map per direction.
"""

from .lattice import (
    Lattice,
    PrimitiveDirection,
    b0_for_unit_flux,
    complete_basis,
    dual_basis,
    enumerate_primitive_directions,
    flux_integer,
    is_generic,
    load_lattice,
    perp_primitive,
    primitive_decompose,
    save_lattice,
    unit_flux_sublattice,
)
from .fields import (
    DirectionalProfile,
    FourierField2D,
    MagneticPotential,
    build_potential,
    eval_A,
    eval_field,
    eval_profile,
    eval_profile_real,
    hypothesis_margin,
    line_average,
    load_field,
    profile_antiderivative,
    profile_derivative,
    project_direction,
    random_admissible_field,
    random_mean_zero_field,
    save_field,
)
from .operators import (
    GridFunction,
    H_commutation_residual,
    a0,
    apply_H,
    commutator_phase,
    grid_function_from_callable,
    magnetic_translate,
    transport_residual,
)
from .invariants import (
    F_coeff,
    G_coeff,
    HypothesisError,
    I_full,
    InvariantSet,
    J_full_Vpart,
    compute_invariant_set,
    default_quadrature_points,
    load_invariants,
    pushforward_functional,
    save_invariants,
    tail_magnitude,
    truncate_invariants,
    y_map,
)
from .inversion import (
    MonotoneMap,
    MonotonicityError,
    ReconstructionReport,
    assemble_field,
    build_monotone_map,
    build_report,
    coefficient_errors,
    format_report,
    invert_invariants,
    recover_Bdelta,
    recover_Vdelta,
    report_rows,
    roundtrip,
    synthesize_sprime,
)

__version__ = "0.1.0"
