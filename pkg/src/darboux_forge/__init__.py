"""Constructive geometry of hypersurface pairs enveloping a common sphere
congruence, built from a curve-level Ribaucour transform, plus independent
finite-difference checks of the structural identities involved."""

from .bonnet_oracle import (
    BonnetJet,
    bonnet_frame,
    first_order_identity_check,
    make_admissible_jet,
    second_order_identity_check,
)
from .curve_ribaucour import (
    CurveQc,
    EnvelopedCircle,
    RibaucourState,
    curve_from_spec,
    enveloped_circle,
    first_integral,
    integrate_states,
    ode_rhs,
    project_initial_state,
    ribaucour_curve_transform,
)
from .darboux_factory import (
    DarbouxPair,
    FAMILIES,
    build_cone_cylinder,
    build_cylinder,
    build_pair_from_inputs,
    build_rotation,
    darboux_partner,
    lift_congruence,
    mobius_mismatch,
)
from .hypersurface import (
    DomainError,
    FundamentalForms,
    ImmersionJet,
    InversionSpec,
    ParamImmersion,
    apply_inversion,
    fundamental_forms,
    get_surface,
    inversion_shape_law,
    invert_surface,
    jet_eval,
)
from .lorentz_model import (
    EuclideanEmbedding,
    HyperplaneError,
    SphereElement,
    congruence_induced_metric,
    congruence_map,
    congruence_regularity,
    lorentz_to_sphere,
    minkowski_dot,
    sphere_to_lorentz,
    standard_embedding,
)
from .verifier import (
    CheckReport,
    DEFAULT_TOLS,
    Grid,
    check_b_squared,
    check_common_congruence,
    check_conformality,
    check_darboux_condition,
    check_envelope,
    check_radius_trace,
    recover_ribaucour_data,
    run_all,
    sample_grid,
    weyl_display_quadratic_residual,
    weyl_product_check,
)

__version__ = "0.1.0"

__all__ = [
    "BonnetJet",
    "CheckReport",
    "CurveQc",
    "DEFAULT_TOLS",
    "DarbouxPair",
    "DomainError",
    "EnvelopedCircle",
    "EuclideanEmbedding",
    "FAMILIES",
    "FundamentalForms",
    "Grid",
    "HyperplaneError",
    "ImmersionJet",
    "InversionSpec",
    "ParamImmersion",
    "RibaucourState",
    "SphereElement",
    "apply_inversion",
    "bonnet_frame",
    "build_cone_cylinder",
    "build_cylinder",
    "build_pair_from_inputs",
    "build_rotation",
    "check_b_squared",
    "check_common_congruence",
    "check_conformality",
    "check_darboux_condition",
    "check_envelope",
    "check_radius_trace",
    "congruence_induced_metric",
    "congruence_map",
    "congruence_regularity",
    "curve_from_spec",
    "darboux_partner",
    "enveloped_circle",
    "first_integral",
    "first_order_identity_check",
    "fundamental_forms",
    "get_surface",
    "integrate_states",
    "inversion_shape_law",
    "invert_surface",
    "jet_eval",
    "lift_congruence",
    "lorentz_to_sphere",
    "make_admissible_jet",
    "minkowski_dot",
    "mobius_mismatch",
    "ode_rhs",
    "project_initial_state",
    "recover_ribaucour_data",
    "ribaucour_curve_transform",
    "run_all",
    "sample_grid",
    "second_order_identity_check",
    "sphere_to_lorentz",
    "standard_embedding",
    "weyl_display_quadratic_residual",
    "weyl_product_check",
]
