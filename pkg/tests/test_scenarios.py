import pytest

from sieveswitch.bounds import margin
from sieveswitch.errors import ConfigError
from sieveswitch.scenarios import (
    CASE_IDS,
    ScenarioConfig,
    build_theta,
    diophantine_theta,
    evaluate,
    harman_parameters,
    max_admissible_rho,
    min_admissible_theta,
    reproduce,
)
from sieveswitch.weights import kuhn, trivial


def test_build_theta_examples():
    t = build_theta(ScenarioConfig("diophantine", kuhn(6.6, 23), rho=0.092))
    assert t.theta1 == pytest.approx(0.2413333333, abs=1e-9)
    assert float(t.theta2(0.25)) == pytest.approx(0.283, abs=1e-12)
    c = build_theta(ScenarioConfig("constant_lod", kuhn(6, 20), theta=0.267))
    assert (c.theta1, float(c.theta2(0.1)), float(c.theta2(0.2))) == (0.267, 0.267, 0.267)
    z = build_theta(ScenarioConfig("diophantine", kuhn(6, 20), rho=0.0))
    assert z.theta1 == pytest.approx(1 / 3)
    assert float(z.theta2(0.4)) == pytest.approx(0.3)


@pytest.mark.parametrize(
    "cfg, field",
    [
        (dict(scenario_kind="diophantine", rho=0.25), "rho"),
        (dict(scenario_kind="diophantine", rho=-0.01), "rho"),
        (dict(scenario_kind="diophantine"), "rho"),
        (dict(scenario_kind="constant_lod", theta=1.2), "theta"),
        (dict(scenario_kind="custom"), "theta_custom"),
    ],
)
def test_build_theta_errors(cfg, field):
    with pytest.raises(ConfigError, match=field):
        build_theta(ScenarioConfig(weight=kuhn(6, 20), **cfg))


def test_config_round_trip_and_errors():
    cfg = ScenarioConfig("diophantine", kuhn(6.6, 23), rho=0.092, R0=1)
    back = ScenarioConfig.from_dict(cfg.to_dict())
    assert back.to_dict() == cfg.to_dict()
    d = cfg.to_dict()
    with pytest.raises(ConfigError, match="scenario_kind"):
        ScenarioConfig.from_dict({**d, "scenario_kind": "bogus"})
    with pytest.raises(ConfigError, match="route"):
        ScenarioConfig.from_dict({**d, "route": "fast"})
    with pytest.raises(ConfigError, match="weight"):
        ScenarioConfig.from_dict({k: v for k, v in d.items() if k != "weight"})
    with pytest.raises(ConfigError, match="weight.u"):
        ScenarioConfig.from_dict({**d, "weight": {"family": "kuhn", "u": 1.5, "v": 23}})
    with pytest.raises(ConfigError, match="unknown"):
        ScenarioConfig.from_dict({**d, "rh0": 0.1})
    with pytest.raises(ConfigError, match="quad"):
        ScenarioConfig.from_dict({**d, "quad": {"tol": 1}})
    with pytest.raises(ConfigError, match="schema_version"):
        ScenarioConfig.from_dict({**d, "schema_version": 99})


def test_harman_parameters():
    p = harman_parameters(1 / 25)
    t1 = 1 / 3 - 1 / 25
    assert p == pytest.approx({"u": 1 / t1, "v": 4 / t1, "lam": 1 / (5 - 1 / t1)})


def test_reproduce_examples():
    assert reproduce("const-lod-267")[0][2].admissible
    reports = dict((name, rep) for name, _, rep in reproduce("harman-original"))
    assert reports["rho=1/150"].admissible
    (_, cfg, rep), = reproduce("harman-richert-1-25")
    assert rep.admissible
    t1 = 1 / 3 - 1 / 25
    assert (cfg.weight.u, cfg.weight.v, cfg.weight.lam) == pytest.approx((1 / t1, 4 / t1, 1 / (5 - 1 / t1)))


def test_reproduce_unknown_case():
    with pytest.raises(ConfigError, match="unknown case"):
        reproduce("harman-imaginary")
    assert len(CASE_IDS) == 6


def test_reproduce_is_repeatable():
    a = [rep.to_dict() for _, _, rep in reproduce("harman-richert-0075")]
    b = [rep.to_dict() for _, _, rep in reproduce("harman-richert-0075")]
    assert a == b


def test_max_rho_kuhn():
    res = max_admissible_rho("kuhn", {"u": (5, 8), "v": (15, 30)}, threads=4)
    assert res.found and res.value >= 0.092
    # the optimum lies on the same ridge as the hand-picked (6.6, 23)
    assert 5.5 <= res.params["u"] <= 7.5 and 18 <= res.params["v"] <= 26
    w = kuhn(res.params["u"], res.params["v"])
    assert margin(diophantine_theta(res.value), w).admissible
    assert not margin(diophantine_theta(res.value + 1e-4), w).admissible


def test_max_rho_kuhn_is_thread_independent():
    a = max_admissible_rho("kuhn", {"u": (6, 7), "v": (20, 24)}, grid_points=2, threads=1)
    b = max_admissible_rho("kuhn", {"u": (6, 7), "v": (20, 24)}, grid_points=2, threads=6)
    assert (a.value, a.params, a.report.to_dict()) == (b.value, b.params, b.report.to_dict())


def test_max_rho_trivial():
    res = max_admissible_rho("trivial", {"v": (8, 14)})
    assert res.found and res.value >= 1 / 16
    assert abs(res.params["v"] - 10.8) <= 1.0


@pytest.mark.slow
def test_max_rho_richert():
    box = {"u": (4.0, 4.2), "v": (19.1, 19.3), "lam": (0.70, 0.73)}
    res = max_admissible_rho("richert", box, grid_points=1, route="small_r", threads=8)
    assert res.found and res.value >= 0.075


def test_max_rho_not_found():
    res = max_admissible_rho("kuhn", {"u": (4.0, 4.2), "v": (4.5, 4.7)}, grid_points=2)
    assert not res.found and res.value is None
    assert isinstance(res.best_margin, float)


def test_min_theta_kuhn():
    res = min_admissible_theta(kuhn(6, 20))
    assert res.found and res.value <= 0.267
    assert res.report.admissible
    assert evaluate(ScenarioConfig("constant_lod", kuhn(6, 20), theta=res.value)).admissible
    assert evaluate(ScenarioConfig("constant_lod", kuhn(6, 20), theta=0.25)).margin < 0


def test_min_theta_trivial_exists():
    res = min_admissible_theta(trivial(10.8))
    assert res.found and 0 < res.value < 1


def test_min_theta_window_regression():
    # enlarging the window slightly around the preset does not raise theta_star
    base = min_admissible_theta(kuhn(6, 20)).value
    wider = min_admissible_theta(kuhn(5.9, 20)).value
    assert wider <= base + 1e-4


def test_min_theta_not_found():
    # theta * v is capped by the f/F table, so theta stays below 1/u
    res = min_admissible_theta(kuhn(4.5, 60))
    assert not res.found and res.value is None
    assert res.best_margin < 0
