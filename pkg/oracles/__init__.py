"""Ground-truth values used to validate the estimators."""

from .coefficients import TheoreticalCoefficients, generic_ell, theoretical_coefficients
from .numeric import UnivariateLaw, lower_moment, numeric_hg, numeric_lp_quantile, upper_moment
from .student import (
    QUANTILE_REGRESSION_ANCHOR,
    StudentConditionalLaw,
    anchor_level,
    student_conditional_quantile,
    student_conditional_tvar,
)

__all__ = [
    "QUANTILE_REGRESSION_ANCHOR",
    "StudentConditionalLaw",
    "TheoreticalCoefficients",
    "UnivariateLaw",
    "anchor_level",
    "generic_ell",
    "lower_moment",
    "numeric_hg",
    "numeric_lp_quantile",
    "student_conditional_quantile",
    "student_conditional_tvar",
    "theoretical_coefficients",
    "upper_moment",
]
