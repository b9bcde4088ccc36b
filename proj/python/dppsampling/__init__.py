"""Exact sampling of determinantal point processes.

Thin wrapper over the C++ core. Kernels are Hermitian matrices with
spectrum in [0, 1]; samples are sorted 0-based index lists.
"""

from ._dppcore import (
    ContractError,
    DomainError,
    Kernel,
    NumericalError,
    bernoulli_envelope,
    calibrated_kernel,
    enumerate_distribution,
    ginibre_kernel,
    kernel_from_matrix,
    marginal,
    probability,
    projection_kernel,
    random_kernel,
    sample,
)

__all__ = [
    "ContractError",
    "DomainError",
    "Kernel",
    "NumericalError",
    "bernoulli_envelope",
    "calibrated_kernel",
    "enumerate_distribution",
    "ginibre_kernel",
    "kernel_from_matrix",
    "marginal",
    "probability",
    "projection_kernel",
    "random_kernel",
    "sample",
]
