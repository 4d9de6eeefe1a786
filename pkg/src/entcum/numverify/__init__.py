"""Numeric evaluation and Monte Carlo verification."""

from .estimate import CumulantEstimates, InsufficientSamples, estimate_cumulants
from .polygamma import BigFloat, base_value, eval_expr, polygamma_num, to_decimal_string
from .sampling import (
    EigensolverError,
    SampleBatch,
    entropy_S,
    induced_T,
    jacobi_eigvalsh,
    sample_entropy,
    sample_spectrum,
    wishart_spectra,
)
from .verify import OrderResult, VerificationReport, verify

__all__ = [
    "BigFloat",
    "CumulantEstimates",
    "EigensolverError",
    "InsufficientSamples",
    "OrderResult",
    "SampleBatch",
    "VerificationReport",
    "base_value",
    "entropy_S",
    "estimate_cumulants",
    "eval_expr",
    "induced_T",
    "jacobi_eigvalsh",
    "polygamma_num",
    "sample_entropy",
    "sample_spectrum",
    "to_decimal_string",
    "verify",
    "wishart_spectra",
]
