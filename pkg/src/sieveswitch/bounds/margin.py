"""Admissibility margin sigma1 - sigma2 and its report."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from ..errors import BudgetExceededError, RoutePreconditionError
from ..quad import IntegralResult
from ..quad.engine import MAX_DIM
from ..sievefn import SieveFunctions, default_functions
from ..weights import WeightSpec, capital_R, k1_route_valid, r_zero
from .coefficients import (
    Coefficient,
    QuadOptions,
    harman_pointwise_terms,
    sigma1_terms,
    sigma2_coeff,
    u2_general_terms,
    u2_k1_terms,
    u2_small_r_terms,
)
from .theta import ThetaSpec

ROUTES = ("auto", "k1", "small_r", "general", "harman_pointwise")
DEFAULT_MARGIN_TOL = 1e-3
MAX_TIGHTENINGS = 3


@dataclass
class MarginReport:
    sigma1: float
    sigma2: float
    margin: float
    route: str
    per_integral: list[IntegralResult] = field(default_factory=list)
    admissible: bool = False
    margin_tolerance: float = DEFAULT_MARGIN_TOL
    error_estimate: float = 0.0
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "sigma1": self.sigma1,
            "sigma2": self.sigma2,
            "margin": self.margin,
            "route": self.route,
            "admissible": self.admissible,
            "margin_tolerance": self.margin_tolerance,
            "error_estimate": self.error_estimate,
            "warnings": list(self.warnings),
            "per_integral": [
                {"label": r.label, "value": r.value, "error_estimate": r.error_estimate}
                for r in self.per_integral
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MarginReport":
        return cls(
            sigma1=d["sigma1"],
            sigma2=d["sigma2"],
            margin=d["margin"],
            route=d["route"],
            per_integral=[IntegralResult(p["value"], p["error_estimate"], label=p["label"]) for p in d["per_integral"]],
            admissible=d["admissible"],
            margin_tolerance=d["margin_tolerance"],
            error_estimate=d["error_estimate"],
            warnings=list(d["warnings"]),
        )


def select_route(w: WeightSpec, S: int, route: str = "auto") -> str:
    if route not in ROUTES:
        raise RoutePreconditionError(f"unknown route {route!r}; expected one of {ROUTES}")
    if route != "auto":
        return route
    if k1_route_valid(w) and w.u >= S + 1 - 1e-12:
        return "k1"
    if capital_R(w) - 1 <= MAX_DIM:
        return "small_r"
    if r_zero(w) is not None:
        return "general"
    raise RoutePreconditionError("no evaluation route is valid for this weight")


def _u2(route, theta, w, S, sf, opts, R, R0) -> Coefficient:
    if route == "k1":
        return u2_k1_terms(theta, w, S, sf, opts)
    if route == "small_r":
        return u2_small_r_terms(theta, w, S, R, sf, opts)
    if route == "general":
        return u2_general_terms(theta, w, S, R0, sf, opts)
    return harman_pointwise_terms(theta, w, S, sf, opts)


def _evaluate(theta, w, S, route, tol, sf, opts, R, R0) -> MarginReport:
    s1 = sigma1_terms(theta, w, sf, opts)
    u2 = _u2(route, theta, w, S, sf, opts, R, R0)
    sigma2 = sigma2_coeff(u2.value)
    sigma1 = s1.value
    margin = sigma1 - sigma2
    err = s1.error + 2.0 * u2.error
    terms = list(s1.terms) + [
        IntegralResult(2.0 * t.value, 2.0 * t.error_estimate, label="sigma2<-" + t.label) for t in u2.terms
    ]
    admissible = bool(math.isfinite(margin) and margin >= tol and err < tol / 10.0)
    return MarginReport(
        sigma1=sigma1,
        sigma2=sigma2,
        margin=margin,
        route=route,
        per_integral=terms,
        admissible=admissible,
        margin_tolerance=tol,
        error_estimate=err,
        warnings=theta.warnings(w) + s1.warnings + u2.warnings,
    )


def margin(
    theta: ThetaSpec,
    w: WeightSpec,
    S: int | None = None,
    route: str = "auto",
    margin_tolerance: float = DEFAULT_MARGIN_TOL,
    sf: SieveFunctions | None = None,
    opts: QuadOptions | None = None,
    R: int | None = None,
    R0: int | None = None,
) -> MarginReport:
    """Evaluate sigma1, sigma2 and the margin along the chosen route.

    If the margin clears the tolerance but the quadrature error budget
    (a tenth of the tolerance) does not, tolerances are tightened tenfold
    and the evaluation repeated, at most MAX_TIGHTENINGS times.
    """
    S = w.S if S is None else S
    sf = sf or default_functions()
    opts = opts or QuadOptions()
    chosen = select_route(w, S, route)
    report = _evaluate(theta, w, S, chosen, margin_tolerance, sf, opts, R, R0)
    for _ in range(MAX_TIGHTENINGS):
        if report.admissible or not (report.margin >= margin_tolerance):
            break
        opts = replace(opts, tol_low=opts.tol_low / 10, tol_high=opts.tol_high / 10)
        try:
            report = _evaluate(theta, w, S, chosen, margin_tolerance, sf, opts, R, R0)
        except BudgetExceededError as exc:
            report.warnings.append(f"tolerance tightening stopped: {exc}")
            break
    return report


