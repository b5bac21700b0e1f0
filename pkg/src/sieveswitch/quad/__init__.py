"""Quadrature over ordered simplices and polytopes, with a Monte Carlo oracle."""

from .engine import IntegralResult, IntegralTask, default_tolerance, integrate
from .integrands import Constant, Integrand, Monomial, PositivePart, Product
from .montecarlo import MCResult, mc_integrate
from .region import LinearConstraint, Polytope

__all__ = [
    "Constant",
    "IntegralResult",
    "IntegralTask",
    "Integrand",
    "LinearConstraint",
    "MCResult",
    "Monomial",
    "Polytope",
    "PositivePart",
    "Product",
    "default_tolerance",
    "integrate",
    "mc_integrate",
]
