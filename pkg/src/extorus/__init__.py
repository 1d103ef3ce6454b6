"""Extremal length on flat tori: closed forms, harmonic-map energies,
first and second variations along Beltrami deformations, and a
self-verifying cross-check suite."""

from .moduli import (
    CurveClass,
    KerckhoffDistance,
    MappingClass,
    Modulus,
    apply_mapping_class,
    cylinder_modulus,
    extremal_length,
    format_complex,
    format_curve,
    hyperbolic_distance,
    kerckhoff_distance,
    levi_form,
    parse_complex,
    parse_curve,
    weighted_extremal_length,
)
from .harmonic import (
    HarmonicMapTorus,
    HopfDifferential,
    build_harmonic_map,
    energy,
    hopf,
    jacobian_defect,
)
from .beltrami import (
    BeltramiField,
    FIELD_CATALOG,
    catalog_field,
    constant,
    field_from_spec,
    from_function,
    modulus_path_constant,
    pair_hopf,
    teich_geodesic_constant,
)
from .variation import (
    IdentityReport,
    VariationField,
    first_variation,
    identity_eq11_check,
    identity_eq15_evaluate,
    pair_sum_levi,
    second_variation_constant,
    solve_variation_field,
    teich_bound_check,
)
from .verify import (
    SuiteResult,
    ToleranceProfile,
    fd_first_variation,
    fd_levi_form,
    fd_second_variation,
    run_suite,
)

__version__ = "0.1.0"
