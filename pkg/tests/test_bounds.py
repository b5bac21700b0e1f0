import json
import math

import numpy as np
import pytest

from oracles import f_closed
from sieveswitch.bounds import (
    MarginReport,
    QuadOptions,
    ThetaSpec,
    harman_pointwise_u2,
    margin,
    select_route,
    sigma1_coeff,
    sigma2_coeff,
    u2_coeff_general,
    u2_coeff_k1,
    u2_coeff_small_r,
)
from sieveswitch.bounds.coefficients import sigma1_terms, u2_k1_terms
from sieveswitch.bounds.integrands import Sigma1Window
from sieveswitch.errors import CapacityError, OutOfRangeError, RoutePreconditionError
from sieveswitch.quad import IntegralTask, mc_integrate
from sieveswitch.scenarios import harman_parameters
from sieveswitch.sievefn import default_functions
from sieveswitch.weights import kuhn, richert, trivial

E_MINUS_GAMMA = math.exp(-0.57721566490153286061)


def dioph(rho):
    return ThetaSpec(1 / 3 - rho, 0.5 - rho, -0.5)


def harman_weight(rho):
    p = harman_parameters(rho)
    return richert(p["u"], p["v"], p["lam"])


def test_sigma1_trivial_closed_form():
    v = 10.8
    theta = ThetaSpec.constant(4 / v)
    assert sigma1_coeff(theta, trivial(v)) == pytest.approx(v * math.log(3) / 2, abs=1e-6)
    assert v * math.log(3) / 2 == pytest.approx(5.93251, abs=1e-5)


def test_sigma1_vanishes_when_f_does():
    assert sigma1_coeff(ThetaSpec.constant(0.18), trivial(10.8)) == 0.0


def test_sigma1_normalization_sanity():
    v = 10.8
    for s in np.linspace(2.1, 4.0, 9):
        got = sigma1_coeff(ThetaSpec.constant(s / v), trivial(v))
        assert got == pytest.approx(E_MINUS_GAMMA * v * f_closed(s), abs=1e-6)


def test_sigma1_kuhn_against_monte_carlo():
    sf = default_functions()
    w, theta = kuhn(6, 20), ThetaSpec.constant(0.267)
    value = sigma1_coeff(theta, w)
    assert value > 0
    a, b = w.window
    mc = mc_integrate(IntegralTask(1, (a,), (b,), Sigma1Window(w, theta, sf)), samples=10**6, seed=5)
    mc_value = E_MINUS_GAMMA * 20 * (sf.f(0.267 * 20) - mc.value)
    assert abs(mc_value - value) <= 3 * E_MINUS_GAMMA * 20 * mc.standard_error


def test_sigma1_window_past_theta1_diverges():
    coeff = sigma1_terms(dioph(0.2), kuhn(6.6, 23))
    assert coeff.value == -math.inf
    assert coeff.warnings


def test_sigma1_out_of_range():
    with pytest.raises(OutOfRangeError):
        sigma1_coeff(ThetaSpec.constant(0.9), trivial(20))


def test_u2_k1_kuhn_constant_level():
    res = u2_k1_terms(ThetaSpec.constant(0.267), kuhn(6, 20), 3)
    assert res.error <= 1e-6
    assert res.value > 0


def test_u2_k1_empty_tail():
    coeff = u2_k1_terms(ThetaSpec.constant(0.267), kuhn(4, 4.5), 3)
    assert len(coeff.terms) == 1  # [1/4, 1/4] contributes nothing


def test_u2_k1_preconditions():
    with pytest.raises(RoutePreconditionError):
        u2_coeff_k1(ThetaSpec.constant(0.267), richert(4.1, 19.2, 0.7), 3)
    with pytest.raises(RoutePreconditionError):
        u2_coeff_k1(ThetaSpec.constant(0.267), kuhn(3.5, 20), 3)


@pytest.mark.parametrize("theta", [ThetaSpec.constant(0.267), dioph(0.05), dioph(0.09)])
def test_route_equivalence(theta):
    w = kuhn(5, 8)
    k1 = u2_coeff_k1(theta, w, 3)
    small = u2_coeff_small_r(theta, w, 3)
    gen = u2_coeff_general(theta, w, 3, R0=1)
    assert abs(small - k1) / k1 <= 1e-3
    assert abs(gen - k1) <= 1e-4


def test_general_reproduces_kuhn_dioph_inputs():
    theta, w = dioph(0.092), kuhn(6.6, 23)
    assert u2_coeff_general(theta, w, 3, R0=1) == pytest.approx(u2_coeff_k1(theta, w, 3), abs=1e-4)


def test_small_r_empty_range():
    assert u2_coeff_small_r(ThetaSpec.constant(0.267), kuhn(5, 8), 3, R=3) == 0.0


def test_small_r_capacity():
    with pytest.raises(CapacityError):
        u2_coeff_small_r(ThetaSpec.constant(0.267), kuhn(6.6, 23), 3, R=8)


def test_general_trivial_only_tail():
    from sieveswitch.bounds.coefficients import u2_general_terms

    coeff = u2_general_terms(dioph(1 / 16), trivial(10.8), 3, R0=0)
    assert [t.label for t in coeff.terms] == ["u2:general:M2:tail"]
    assert coeff.value == pytest.approx(u2_coeff_k1(dioph(1 / 16), trivial(10.8), 3), abs=1e-9)


def test_general_preconditions():
    with pytest.raises(RoutePreconditionError):
        u2_coeff_general(ThetaSpec.constant(0.267), richert(4.1, 19.2, 0.7), 3)
    with pytest.raises(RoutePreconditionError):
        u2_coeff_general(ThetaSpec.constant(0.267), kuhn(6, 20), 3, R0=0)


def test_sigma2():
    assert sigma2_coeff(0) == 0
    assert sigma2_coeff(1.5) == 3.0
    with pytest.raises(ValueError):
        sigma2_coeff(-0.1)
    u2 = u2_coeff_k1(ThetaSpec.constant(0.267), kuhn(6, 20), 3)
    rep = margin(ThetaSpec.constant(0.267), kuhn(6, 20))
    assert rep.sigma2 == pytest.approx(2 * u2, abs=1e-6)


def test_harman_pointwise():
    w = harman_weight(1 / 150)
    assert harman_pointwise_u2(dioph(1 / 150), w, lam=0) == 0.0
    with pytest.raises(RoutePreconditionError):
        harman_pointwise_u2(dioph(1 / 150), kuhn(6, 20))
    r150 = margin(dioph(1 / 150), w, route="harman_pointwise")
    r300 = margin(dioph(1 / 300), harman_weight(1 / 300), route="harman_pointwise")
    assert r150.margin > 0 and r150.admissible
    assert r300.margin > r150.margin and r300.admissible


@pytest.mark.parametrize("rho", [1 / 25, 1 / 150])
def test_pointwise_dominates_small_r(rho):
    w = harman_weight(rho)
    assert harman_pointwise_u2(dioph(rho), w) >= u2_coeff_small_r(dioph(rho), w, 3) - 1e-4


def test_margin_examples():
    assert margin(ThetaSpec.constant(0.267), kuhn(6, 20)).admissible
    assert margin(dioph(0.092), kuhn(6.6, 23)).admissible
    bad = margin(dioph(0.2), kuhn(6.6, 23))
    assert not bad.admissible and bad.margin < 0


def test_margin_report_invariants():
    rep = margin(dioph(0.075), richert(4.1, 19.2, 1 / 1.4), route="small_r")
    assert rep.margin == rep.sigma1 - rep.sigma2
    assert rep.admissible == (rep.margin >= rep.margin_tolerance and rep.error_estimate < rep.margin_tolerance / 10)
    back = MarginReport.from_dict(json.loads(json.dumps(rep.to_dict())))
    assert back.to_dict() == rep.to_dict()


def test_margin_nonincreasing_in_rho():
    w = kuhn(6.6, 23)
    margins = [margin(dioph(r), w).margin for r in np.arange(0.005, 0.1501, 0.005)]
    assert all(b <= a + 1e-9 for a, b in zip(margins, margins[1:]))


def test_route_selection():
    assert select_route(kuhn(6, 20), 3) == "k1"
    assert select_route(richert(4.1, 19.2, 0.7), 3) == "small_r"
    assert select_route(kuhn(6, 20), 3, "general") == "general"
    with pytest.raises(RoutePreconditionError):
        select_route(kuhn(6, 20), 3, "fastest")


def test_theta_warnings():
    w = harman_weight(1 / 25)
    assert any("1/u + delta" in m for m in dioph(1 / 25).warnings(w))
    assert ThetaSpec(0.3, 0.005, 0.0).warnings(kuhn(6, 20))


def test_tightening_reaches_error_budget():
    # loose tolerances fail the error budget; the tightening loop must recover
    rep = margin(dioph(0.075), richert(4.1, 19.2, 1 / 1.4), route="small_r", opts=QuadOptions(1e-3, 1e-2))
    assert rep.admissible
    assert rep.error_estimate < rep.margin_tolerance / 10
