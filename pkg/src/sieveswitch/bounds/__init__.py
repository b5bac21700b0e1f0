"""Normalized Sigma_1 lower and Sigma_2 upper bound coefficients, and margins."""

from .coefficients import (
    Coefficient,
    QuadOptions,
    harman_pointwise_u2,
    sigma1_coeff,
    sigma2_coeff,
    u2_coeff_general,
    u2_coeff_k1,
    u2_coeff_small_r,
)
from .margin import ROUTES, MarginReport, margin, select_route
from .theta import DELTA, ThetaSpec

__all__ = [
    "DELTA",
    "ROUTES",
    "Coefficient",
    "MarginReport",
    "QuadOptions",
    "ThetaSpec",
    "harman_pointwise_u2",
    "margin",
    "select_route",
    "sigma1_coeff",
    "sigma2_coeff",
    "u2_coeff_general",
    "u2_coeff_k1",
    "u2_coeff_small_r",
]
