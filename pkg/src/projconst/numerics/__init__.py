"""Numerical building blocks shared by the rest of the package."""

from .dense import (
    exact_inf_norm_inverse,
    kernel_basis,
    null_space_basis,
    power_norm_rows,
    stable_power_sum,
)
from .logscalar import LogScalar, PrecisionLossWarning, log10_ratio
from .rational import format_fraction, to_fraction
from .vandermonde import vandermonde_inverse_norm_bound, vandermonde_matrix

__all__ = [
    "LogScalar",
    "PrecisionLossWarning",
    "exact_inf_norm_inverse",
    "format_fraction",
    "kernel_basis",
    "log10_ratio",
    "null_space_basis",
    "power_norm_rows",
    "stable_power_sum",
    "to_fraction",
    "vandermonde_inverse_norm_bound",
    "vandermonde_matrix",
]
