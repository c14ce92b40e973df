"""Perturbed Halton-Kronecker hybrid sequences: exact generation, exact
star discrepancy, lacunary trigonometric products, and the transfer-operator
brackets for the metric discrepancy exponents."""

from .numtheory import (
    DEFAULT_WIDTH,
    ContinuedFraction,
    SpecialAlpha,
    UnitFraction,
    continued_fraction,
    frac_mul_int,
    make_unit_fraction,
    nearest_int_distance,
    rational_bad,
    shallit_beta,
    theorem_alpha,
    user_alpha,
)
from .sequences import (
    DigitVector,
    PerturbSpec,
    PointSet2,
    digital_point,
    generate_point_set,
    hybrid_point,
    mk_array,
    mk_sequence,
    weighted_digit_sum,
)
from .discrepancy import (
    BoxSide,
    DiscrepancyResult,
    GrowthRecord,
    GuardError,
    brute_force_discrepancy_2d,
    brute_force_discrepancy_points,
    growth_scan,
    star_discrepancy_1d,
    star_discrepancy_2d,
)
from .trigprod import (
    GelfondCertificate,
    SharpnessResult,
    TrigProductParams,
    a_exponent,
    f_iterate,
    g_at_xi,
    g_value,
    g_value_product,
    gelfond_certify,
    log_pi_product,
    log_pi_product_rational,
    pi_product,
    product_upper_bound_log,
    sharpness_identity,
    xi_fixed_point,
)
from .metric import (
    IntegralPi,
    LambdaBracket,
    PhiGrid,
    StructuralReport,
    integral_pi,
    lambda_bracket,
    mu,
    phi_level,
    phi_levels,
    structural_checks,
)
from .expsum import (
    BoundParams,
    ExpSumResult,
    UpperBoundTerms,
    TwoAdditiveCheck,
    exp_sum_mk,
    exp_sum_perturbed,
    geometric_sum,
    upper_bound_rhs,
    product_lower_bound,
    two_additive_bound_check,
)

__version__ = "0.1.0"
