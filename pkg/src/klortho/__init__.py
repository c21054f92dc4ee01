"""Kontorovich-Lebedev transforms, KL convolutions and orthogonality checks.

The numerical core is double precision throughout: special functions in
``specfun``, semi-infinite and index quadrature in ``quad``, the transform
pair in ``kl_core``, convolutions in ``convolution``, the polynomial and
generated families in ``families`` and the Gram-matrix harness in
``harness``. ``klortho`` on the command line wraps all of it.
"""
from .convolution import (
    conv_exp_weight,
    convolve,
    factorization_residual,
    kernel_index_integral,
    parseval_type_eval,
    weighted_functional,
)
from .errors import ConvergenceError, DomainError, KLError, PoleError
from .families import (
    CoefficientTable,
    FamilySpec,
    askey_poly,
    family,
    generated_function,
    kl_image_closed,
    kl_image_integral,
    laguerre,
    prudnikov_poly,
)
from .harness import CASES, case, d_orth_check, expected_diagonal, gram_matrix, verify_case, verify_cases
from .kl_core import HAT, PLAIN, RealFunction, TransformSpec, kl_forward, kl_inverse, parseval_residual, weight_q
from .quad import (
    AlgebraicDecay,
    ExpDecay,
    IndexDecay,
    NoDecay,
    QuadResult,
    QuadSpec,
    SqrtExpDecay,
    integrate_semiinf,
    integrate_tau_index,
)
from .serialize import load_coefficients
from .specfun import besselk_imag, besselk_real, complex_lngamma, hyp_terminating, pochhammer, rho_nu

__version__ = "0.1.0"

__all__ = [
    "AlgebraicDecay", "CASES", "CoefficientTable", "ConvergenceError", "DomainError", "ExpDecay", "FamilySpec",
    "HAT", "IndexDecay", "KLError", "NoDecay", "PLAIN", "PoleError", "QuadResult", "QuadSpec", "RealFunction",
    "SqrtExpDecay", "TransformSpec", "askey_poly", "besselk_imag", "besselk_real", "case", "complex_lngamma",
    "conv_exp_weight", "convolve", "d_orth_check", "expected_diagonal", "factorization_residual", "family",
    "generated_function", "gram_matrix", "hyp_terminating", "integrate_semiinf", "integrate_tau_index",
    "kernel_index_integral", "kl_forward", "kl_image_closed", "kl_image_integral", "kl_inverse", "laguerre",
    "load_coefficients", "parseval_residual", "parseval_type_eval", "pochhammer", "prudnikov_poly", "rho_nu",
    "verify_case", "verify_cases", "weight_q", "weighted_functional",
]
