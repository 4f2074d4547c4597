"""Closed-form coverage evaluation: spectral determinants, Laplace inversion, outer integrals."""

from .coverage import (
    PTP_VARIANTS,
    STP_VARIANTS,
    CoverageModel,
    MonotonicityWarning,
    cdf_pi,
    coverage_backscatter,
    coverage_htt,
    coverage_model,
    coverage_ptp,
    coverage_stp,
    laplace_pi,
    pdf_pi,
    ppp_laplace_pi,
    prob_backscatter_ptp,
    ptp_report,
    stp_report,
)
from .inversion import DEFAULT_INVERSION, InverseLaplaceConfig, inverse_laplace
from .spectral import SpectralOperator, fredholm_det_alpha, log_fredholm_det_alpha, mode_eigenvalue

__all__ = [
    "PTP_VARIANTS",
    "STP_VARIANTS",
    "CoverageModel",
    "MonotonicityWarning",
    "cdf_pi",
    "coverage_backscatter",
    "coverage_htt",
    "coverage_model",
    "coverage_ptp",
    "coverage_stp",
    "laplace_pi",
    "pdf_pi",
    "ppp_laplace_pi",
    "prob_backscatter_ptp",
    "ptp_report",
    "stp_report",
    "DEFAULT_INVERSION",
    "InverseLaplaceConfig",
    "inverse_laplace",
    "SpectralOperator",
    "fredholm_det_alpha",
    "log_fredholm_det_alpha",
    "mode_eigenvalue",
]
