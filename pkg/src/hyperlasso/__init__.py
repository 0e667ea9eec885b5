"""Hyperinterpolation and Lasso hyperinterpolation on the interval, disc,
sphere and cube."""

__version__ = "0.1.0"

from .basis import BasisSet, basis_for, dimension, eval_all  # noqa: E402
from .errors import (ConfigError, EvaluationError, ExactnessError, HyperlassoError,  # noqa: E402
                     InvalidArgument, InvariantViolation, ParseError, ValidationError)
from .estimators import (Expansion, filtered_coefficients, hyper_coefficients,  # noqa: E402
                         lasso_coefficients, soft_threshold, tikhonov_coefficients)
from .noise import NoiseSpec, apply_noise  # noqa: E402
from .quadrature import (Domain, QuadratureRule, cube_rule, disc_rule,  # noqa: E402
                         gauss_legendre_rule, integrate, load_t_design, sphere_product_rule,
                         verify_exactness)

__all__ = [
    "BasisSet", "basis_for", "dimension", "eval_all",
    "ConfigError", "EvaluationError", "ExactnessError", "HyperlassoError",
    "InvalidArgument", "InvariantViolation", "ParseError", "ValidationError",
    "Expansion", "filtered_coefficients", "hyper_coefficients", "lasso_coefficients",
    "soft_threshold", "tikhonov_coefficients",
    "NoiseSpec", "apply_noise",
    "Domain", "QuadratureRule", "cube_rule", "disc_rule", "gauss_legendre_rule",
    "integrate", "load_t_design", "sphere_product_rule", "verify_exactness",
]
