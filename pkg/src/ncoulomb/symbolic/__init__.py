"""Exact symbolic engine: canonical rational expressions and differential operators."""
from .coeff import PARAM_NAMES, ParamCoeff
from .expr import (
    CanonicalExpr,
    DimensionMismatchError,
    EvalPoint,
    PoleError,
    UnsupportedDenominatorError,
    const,
    eval_exact,
    eval_numeric,
    imag_unit,
    inverse_factor,
    p,
    param,
    partial_derivative,
    poisson_bracket,
    r,
    reciprocal,
    sum_exprs,
    x,
    zero,
)
