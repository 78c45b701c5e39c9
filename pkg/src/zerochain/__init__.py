"""Worst-case smooth strongly convex functions for first-order lower bounds.

The package builds hard triplet sets from step schedules, turns them into
exact first-order oracles through a strongly convex extension, and checks
every condition the resulting lower bounds rely on.
"""

from .model import (
    ClassParams,
    OracleResponse,
    Schedule,
    ScheduleKind,
    Triplet,
    TripletSet,
    ValidationReport,
    make_class,
)
from .sequences import (
    build_schedule,
    closed_form_bounds,
    default_schedule,
    lambda_sequence,
    risk_bound,
    schedule_exact_muzero,
    schedule_exact_sc,
    schedule_simple_muzero,
    schedule_simple_sc,
    theta_sequence,
    validate_schedule,
    xrisk_bound,
)
from .extension import (
    ExtensionOracle,
    check_interpolation_conditions,
    check_lower_quadratic,
    eval_oracle,
    maximize_simplex,
    v_quad,
)
from .instance import (
    HardInstance,
    build_hard_instance,
    compute_Kj,
    span_distance_certificate,
    span_value_certificate,
    validate_corollary1,
    verify_zero_chain,
)
from .methods import (
    Trajectory,
    audit_zero_respecting,
    run_gradient_descent,
    run_method,
    score_against_bounds,
)

__version__ = "0.1.0"

__all__ = [
    "ClassParams",
    "OracleResponse",
    "Schedule",
    "ScheduleKind",
    "Triplet",
    "TripletSet",
    "ValidationReport",
    "make_class",
    "build_schedule",
    "closed_form_bounds",
    "default_schedule",
    "lambda_sequence",
    "risk_bound",
    "schedule_exact_muzero",
    "schedule_exact_sc",
    "schedule_simple_muzero",
    "schedule_simple_sc",
    "theta_sequence",
    "validate_schedule",
    "xrisk_bound",
    "ExtensionOracle",
    "check_interpolation_conditions",
    "check_lower_quadratic",
    "eval_oracle",
    "maximize_simplex",
    "v_quad",
    "HardInstance",
    "build_hard_instance",
    "compute_Kj",
    "span_distance_certificate",
    "span_value_certificate",
    "validate_corollary1",
    "verify_zero_chain",
    "Trajectory",
    "audit_zero_respecting",
    "run_gradient_descent",
    "run_method",
    "score_against_bounds",
]
