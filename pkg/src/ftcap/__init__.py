"""Finite-time mutual information of Gaussian processes.

Two independent routes to the same quantity: covariance log-determinants
on a sampling grid (:mod:`ftcap.covariance_mi`) and the Mercer eigen-series
of the exponential kernel (:mod:`ftcap.mercer`, :mod:`ftcap.capacity`).
"""
from ftcap.capacity import (
    CapacityReport,
    delta_I_asymptote,
    exceed_delta,
    exceed_shannon_report,
    finite_time_mi,
    instant_rate,
    mercer_mi,
    shannon_capacity_exponential,
    shannon_capacity_quadrature,
)
from ftcap.covariance_mi import (
    CovariancePair,
    SampleGrid,
    awgn_sample_covariance,
    covariance_matrix,
    discrete_mutual_information,
    logdet_spd,
    mi_vs_n,
    uniform_grid,
)
from ftcap.errors import (
    DivergenceError,
    InsufficientDepthError,
    NotPositiveDefiniteError,
    NumericalError,
    TheoremViolation,
)
from ftcap.kernels import (
    AWGN,
    ExponentialKernel,
    SincKernel,
    eval_autocorrelation,
    eval_psd,
    validate_kernel,
)
from ftcap.mercer import (
    EigenPair,
    MercerSpectrum,
    eigenfunction_eval,
    exponential_spectrum,
    integral_equation_residual,
    normalization_constant,
    nystrom_spectrum,
    omega_root,
    trace_square_closed,
)

__version__ = "0.1.0"
