"""Stabilizing switching laws from piecewise smooth control-Lyapunov
functions: construction, Filippov simulation, and numerical certification."""

from .config import DEFAULT, Tolerances
from .linalg import (
    eig_general,
    eig_symmetric,
    is_hurwitz,
    is_positive_definite,
    lyapunov_solve,
)
from .model import (
    Monomial,
    SwitchedSystem,
    VectorField,
    dump_system,
    eval_convex_combination,
    eval_field,
    linear_field,
    load_system,
    polynomial_field,
)
from .clf import (
    Pwsclf,
    RateFunction,
    active_pieces,
    directional_derivative,
    dump_clf,
    load_clf,
    piece_directional_derivative,
    piece_gradient,
    piecewise_quadratic,
    pointwise_max,
    pointwise_min,
    polynomial_rate,
    quadratic_rate,
    rate_value,
    smooth_polynomial,
    smooth_quadratic,
    value,
)
from .switchlaw import (
    RegionLaw,
    SlidingSurface,
    SwitchingLaw,
    boundary_limit_modes,
    candidate_surfaces,
    is_regular,
    linear_fn,
    load_region_law,
    polynomial_fn,
    quadratic_fn,
    sliding_candidate_modes,
    sliding_coefficients,
)
from .fsim import (
    SimConfig,
    Trajectory,
    fit_exponential_rate,
    lyapunov_trace,
    simulate_filippov,
    simulate_relay,
)
from .certify import (
    ArgminDiagnostic,
    BmiCertificate,
    CertReport,
    argmin_diagnostic,
    certificate_from_dict,
    certificate_to_dict,
    check_condition_12,
    check_largest_region_conditions,
    check_pointwise_max_conditions,
    check_psclf,
    check_strict_completeness,
    search_stable_convex_combination,
    verify_bmi_certificate,
)

__version__ = "0.1.0"
