"""Normalized coefficients of X_1 / log x in the Sigma_1 and Sigma_2 bounds.

Everything here is specialized to unit sieve densities, where the Mertens
products collapse to e^{-gamma} v / log x and 2 e^{-gamma} / log x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import CapacityError, OutOfRangeError, RoutePreconditionError
from ..quad import IntegralResult, IntegralTask, LinearConstraint, integrate
from ..quad.engine import MAX_DIM
from ..sievefn import EULER_GAMMA, SieveFunctions, default_functions
from ..weights import WeightSpec, capital_R, k1_route_valid, r_zero
from .integrands import Sigma1Window, U2Tail, U2WindowK1, WeightedSimplex, WindowRoughTail
from .theta import ThetaSpec

EXP_MINUS_GAMMA = math.exp(-EULER_GAMMA)
_TINY = 1e-12


@dataclass
class QuadOptions:
    """Per-dimension tolerances and the cell budget handed to the engine."""

    tol_low: float = 1e-6  # d <= 2
    tol_high: float = 1e-4  # d >= 3
    budget: int = 10**7

    def tolerance(self, dim: int) -> float:
        return self.tol_low if dim <= 2 else self.tol_high


@dataclass
class Coefficient:
    value: float
    terms: list[IntegralResult] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def error(self) -> float:
        return math.fsum(t.error_estimate for t in self.terms)


def _run(task: IntegralTask, opts: QuadOptions) -> IntegralResult:
    return integrate(task, budget=opts.budget)


def _scaled(res: IntegralResult, factor: float, label: str) -> IntegralResult:
    return IntegralResult(
        res.value * factor,
        res.error_estimate * abs(factor),
        label=label,
        points=res.points,
        subdivisions=res.subdivisions,
    )


# -- Sigma_1 -----------------------------------------------------------------


def sigma1_terms(
    theta: ThetaSpec, w: WeightSpec, sf: SieveFunctions | None = None, opts: QuadOptions | None = None
) -> Coefficient:
    sf = sf or default_functions()
    opts = opts or QuadOptions()
    v, t1 = w.v, theta.theta1
    s = t1 * v
    if s > sf.ff_smax:
        raise OutOfRangeError(f"theta1 * v = {s:.6g} exceeds the f/F table limit {sf.ff_smax}")
    main = EXP_MINUS_GAMMA * v * sf.f(s)
    terms = [IntegralResult(main, 0.0, label="sigma1:f(theta1 v)")]
    a, b = w.window
    if b <= a or w.family == "trivial":
        return Coefficient(main, terms)
    # F(v(theta1 - alpha)) blows up as alpha -> theta1; the integral stays
    # finite only if w vanishes from theta1 onwards
    top = min(b, t1)
    if t1 < b:
        probe = np.linspace(max(a, t1), b, 2001)[1:-1]
        left = max(t1 - 1e-10, a)
        if np.any(w(probe) > 0) or (t1 > a and w(left) > 1e-6):
            return Coefficient(
                -math.inf,
                terms,
                [f"window reaches theta1 = {t1:.6g} with positive weight: sieve integral diverges"],
            )
    if top <= a:
        return Coefficient(main, terms)
    task = IntegralTask(
        1, (a,), (top,), Sigma1Window(w, theta, sf), tolerance=opts.tolerance(1), label="sigma1:window"
    )
    res = _run(task, opts)
    terms.append(_scaled(res, -EXP_MINUS_GAMMA * v, "sigma1:window"))
    return Coefficient(main - EXP_MINUS_GAMMA * v * res.value, terms)


def sigma1_coeff(theta: ThetaSpec, w: WeightSpec, sf: SieveFunctions | None = None, opts=None) -> float:
    return sigma1_terms(theta, w, sf, opts).value


# -- U_2 routes ----------------------------------------------------------------


def _tail_task(theta, w, S, sf, opts, label) -> IntegralTask | None:
    a, b = 1.0 / w.u, 1.0 / (S + 1)
    if b <= a + _TINY:
        return None
    return IntegralTask(1, (a,), (b,), U2Tail(theta, S, sf, w.v), tolerance=opts.tolerance(1), label=label)


def u2_k1_terms(theta, w, S, sf=None, opts=None) -> Coefficient:
    sf = sf or default_functions()
    opts = opts or QuadOptions()
    if not k1_route_valid(w):
        raise RoutePreconditionError(f"{w.family} weights admit k > 1; the k = 1 route is invalid")
    if w.u < S + 1 - 1e-12:
        raise RoutePreconditionError(f"k = 1 route needs u >= S + 1 = {S + 1}, got u = {w.u}")
    terms = []
    a, b = w.window
    if b > a:
        task = IntegralTask(
            1, (a,), (b,), U2WindowK1(w, theta, S, sf), tolerance=opts.tolerance(1), label="u2:k1:window"
        )
        terms.append(_run(task, opts))
    tail = _tail_task(theta, w, S, sf, opts, "u2:k1:tail")
    if tail is not None:
        terms.append(_run(tail, opts))
    return Coefficient(math.fsum(t.value for t in terms), terms)


def u2_coeff_k1(theta, w, S, sf=None, opts=None) -> float:
    return u2_k1_terms(theta, w, S, sf, opts).value


def _simplex_task(w, theta, m: int, opts, label, lam=None, extra=(), upper=1.0) -> IntegralTask:
    """Ordered a_1 < ... < a_m, a_1 > 1/v, sum(a) <= 1 - a_m."""
    coef = [1.0] * (m - 1) + [2.0]
    cons = (LinearConstraint(tuple(coef), 1.0),) + tuple(extra)
    return IntegralTask(
        m,
        (1.0 / w.v,) * m,
        (upper,) * m,
        WeightedSimplex(w, theta, m, lam=lam),
        ordered=True,
        constraints=cons,
        tolerance=opts.tolerance(m),
        label=label,
    )


def u2_small_r_terms(theta, w, S, R=None, sf=None, opts=None) -> Coefficient:
    opts = opts or QuadOptions()
    R = capital_R(w) if R is None else R
    if R - 1 > MAX_DIM:
        raise CapacityError(f"R - 1 = {R - 1} exceeds the {MAX_DIM}-dimensional cap; use the general route")
    terms = []
    for J in range(S + 1, R + 1):
        terms.append(_run(_simplex_task(w, theta, J - 1, opts, f"u2:small_r:J={J}"), opts))
    return Coefficient(math.fsum(t.value for t in terms), terms)


def u2_coeff_small_r(theta, w, S, R=None, sf=None, opts=None) -> float:
    return u2_small_r_terms(theta, w, S, R, sf, opts).value


def u2_general_terms(theta, w, S, R0=None, sf=None, opts=None) -> Coefficient:
    sf = sf or default_functions()
    opts = opts or QuadOptions()
    need = r_zero(w)
    if need is None:
        raise RoutePreconditionError(f"{w.family} weights vanish inside the window; R0 is unavailable")
    R0 = need if R0 is None else R0
    if R0 < need:
        raise RoutePreconditionError(f"R0 = {R0} is below the smallest valid value {need}")
    if max(R0, R0 - 1) > MAX_DIM:
        raise CapacityError(f"R0 = {R0} needs integrals above {MAX_DIM} dimensions")
    u = w.u
    terms = []
    # M1: S+1 <= J <= R0 window primes, last prime closing the product
    for J in range(S + 1, R0 + 1):
        m = J - 1
        extra = (LinearConstraint((1.0,) * m, 1.0 - 1.0 / u, ">="),)
        task = _simplex_task(w, theta, m, opts, f"u2:general:M1:J={J}", extra=extra, upper=1.0 / u)
        terms.append(_run(task, opts))
    tail = _tail_task(theta, w, S, sf, opts, "u2:general:M2:tail")
    if tail is not None:
        terms.append(_run(tail, opts))
    a, b = w.window
    if b > a:
        for J in range(1, R0 + 1):
            cons = (LinearConstraint((1.0,) * J, 1.0 - (S - J) / u),)
            task = IntegralTask(
                J,
                (a,) * J,
                (b,) * J,
                WindowRoughTail(w, theta, S, J, sf),
                ordered=True,
                constraints=cons,
                tolerance=opts.tolerance(J),
                label=f"u2:general:M2:J={J}",
            )
            terms.append(_run(task, opts))
    return Coefficient(math.fsum(t.value for t in terms), terms)


def u2_coeff_general(theta, w, S, R0=None, sf=None, opts=None) -> float:
    return u2_general_terms(theta, w, S, R0, sf, opts).value


def harman_pointwise_terms(theta, w, S=3, sf=None, opts=None, lam=None) -> Coefficient:
    """Triple integral with the numerator replaced by the pointwise bound lam.

    ``lam`` defaults to the weight's own Richert parameter.
    """
    opts = opts or QuadOptions()
    if w.family != "richert":
        raise RoutePreconditionError("the pointwise route is defined for Richert weights only")
    if S != 3:
        raise RoutePreconditionError("the pointwise route is fixed to S = 3, R = 4")
    lam = w.lam if lam is None else float(lam)
    if lam == 0:
        return Coefficient(0.0, [])
    task = _simplex_task(w, theta, 3, opts, "u2:harman_pointwise", lam=lam)
    res = _run(task, opts)
    return Coefficient(res.value, [res])


def harman_pointwise_u2(theta, w, S=3, sf=None, opts=None, lam=None) -> float:
    return harman_pointwise_terms(theta, w, S, sf, opts, lam).value


def sigma2_coeff(u2: float) -> float:
    if u2 < 0:
        raise ValueError(f"U2 coefficient must be nonnegative, got {u2}")
    return 2.0 * u2
