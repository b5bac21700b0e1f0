"""Scenario presets, parameter searches and the fixed reproduction suite."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .bounds import MarginReport, QuadOptions, ThetaSpec, margin
from .bounds.margin import DEFAULT_MARGIN_TOL, ROUTES
from .errors import ConfigError, SieveSwitchError
from .sievefn import SieveFunctions, default_functions
from .weights import WeightSpec, kuhn, richert, trivial

SCHEMA_VERSION = 1
SCENARIO_KINDS = ("diophantine", "constant_lod", "custom")
RHO_MAX = 0.2


@dataclass
class ScenarioConfig:
    scenario_kind: str
    weight: WeightSpec
    rho: float | None = None
    theta: float | None = None
    theta_custom: ThetaSpec | None = None
    route: str = "auto"
    quad: QuadOptions = field(default_factory=QuadOptions)
    margin_tolerance: float = DEFAULT_MARGIN_TOL
    R: int | None = None
    R0: int | None = None
    search: dict | None = None

    def __post_init__(self) -> None:
        if self.scenario_kind not in SCENARIO_KINDS:
            raise ConfigError(f"scenario_kind: expected one of {SCENARIO_KINDS}, got {self.scenario_kind!r}")
        if self.route not in ROUTES:
            raise ConfigError(f"route: expected one of {ROUTES}, got {self.route!r}")
        if self.margin_tolerance <= 0:
            raise ConfigError("margin_tolerance: must be positive")

    @property
    def S(self) -> int:
        return self.weight.S

    def to_dict(self) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "scenario_kind": self.scenario_kind,
            "weight": self.weight.to_dict(),
            "S": self.S,
            "route": self.route,
            "margin_tolerance": self.margin_tolerance,
            "quad": {"tol_low": self.quad.tol_low, "tol_high": self.quad.tol_high, "budget": self.quad.budget},
        }
        for key in ("rho", "theta", "R", "R0", "search"):
            if getattr(self, key) is not None:
                d[key] = getattr(self, key)
        if self.theta_custom is not None:
            d["theta_custom"] = self.theta_custom.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ScenarioConfig":
        known = {
            "schema_version", "scenario_kind", "weight", "S", "rho", "theta", "theta_custom",
            "route", "quad", "margin_tolerance", "R", "R0", "search",
        }
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {sorted(unknown)}")
        version = d.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"schema_version: unsupported version {version}")
        if "scenario_kind" not in d:
            raise ConfigError("scenario_kind: missing")
        if not isinstance(d.get("weight"), dict):
            raise ConfigError("weight: missing or not an object")
        wd = dict(d["weight"])
        if "S" in d:
            wd["S"] = d["S"]
        weight = WeightSpec.from_dict(wd)
        quad = d.get("quad", {})
        if not isinstance(quad, dict) or set(quad) - {"tol_low", "tol_high", "budget"}:
            raise ConfigError("quad: expected an object with tol_low, tol_high, budget")
        theta_custom = None
        if d.get("theta_custom") is not None:
            tc = d["theta_custom"]
            try:
                theta_custom = ThetaSpec(float(tc["theta1"]), float(tc["c0"]), float(tc.get("c1", 0.0)))
            except (KeyError, TypeError) as exc:
                raise ConfigError(f"theta_custom: {exc}") from exc
        try:
            return cls(
                scenario_kind=d["scenario_kind"],
                weight=weight,
                rho=None if d.get("rho") is None else float(d["rho"]),
                theta=None if d.get("theta") is None else float(d["theta"]),
                theta_custom=theta_custom,
                route=d.get("route", "auto"),
                quad=QuadOptions(**quad),
                margin_tolerance=float(d.get("margin_tolerance", DEFAULT_MARGIN_TOL)),
                R=d.get("R"),
                R0=d.get("R0"),
                search=d.get("search"),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc


def diophantine_theta(rho: float) -> ThetaSpec:
    """theta1 = 1/3 - rho, theta2(alpha) = (1 - alpha)/2 - rho."""
    if not 0.0 <= rho < RHO_MAX:
        raise ConfigError(f"rho: must lie in [0, {RHO_MAX}), got {rho}")
    return ThetaSpec(theta1=1.0 / 3.0 - rho, c0=0.5 - rho, c1=-0.5)


def build_theta(config: ScenarioConfig) -> ThetaSpec:
    kind = config.scenario_kind
    if kind == "diophantine":
        if config.rho is None:
            raise ConfigError("rho: required for the diophantine scenario")
        return diophantine_theta(config.rho)
    if kind == "constant_lod":
        if config.theta is None or not 0.0 < config.theta < 1.0:
            raise ConfigError(f"theta: must lie in (0, 1), got {config.theta}")
        return ThetaSpec.constant(config.theta)
    if config.theta_custom is None:
        raise ConfigError("theta_custom: required for the custom scenario")
    return config.theta_custom


def evaluate(config: ScenarioConfig, sf: SieveFunctions | None = None) -> MarginReport:
    return margin(
        build_theta(config),
        config.weight,
        route=config.route,
        margin_tolerance=config.margin_tolerance,
        sf=sf,
        opts=config.quad,
        R=config.R,
        R0=config.R0,
    )


# -- searches -------------------------------------------------------------------


def harman_parameters(rho: float) -> dict:
    """Richert parameters v = 4/theta1, u = 1/theta1, lam = 1/(5 - u) (eta = 0)."""
    t1 = 1.0 / 3.0 - rho
    u = 1.0 / t1
    return {"u": u, "v": 4.0 / t1, "lam": 1.0 / (5.0 - u)}


def make_weight(family: str, params: dict, S: int = 3) -> WeightSpec:
    if family == "trivial":
        return trivial(params["v"], S)
    if family == "kuhn":
        return kuhn(params["u"], params["v"], S)
    if family == "richert":
        return richert(params["u"], params["v"], params["lam"], S)
    raise ConfigError(f"search: family {family!r} is not searchable")


@dataclass
class SearchResult:
    found: bool
    value: float | None
    params: dict
    report: MarginReport | None
    best_margin: float
    evaluations: int = 0

    def to_dict(self) -> dict:
        return {
            "found": self.found,
            "value": self.value,
            "params": self.params,
            "best_margin": self.best_margin,
            "evaluations": self.evaluations,
            "report": self.report.to_dict() if self.report else None,
        }


class _Evaluator:
    """Memoized margin evaluation that maps numeric failures to 'inadmissible'."""

    def __init__(self, route, margin_tolerance, sf, opts):
        self.route, self.tol, self.sf, self.opts = route, margin_tolerance, sf, opts
        self.count = 0

    def __call__(self, theta: ThetaSpec, w: WeightSpec) -> MarginReport | None:
        self.count += 1
        try:
            return margin(theta, w, route=self.route, margin_tolerance=self.tol, sf=self.sf, opts=self.opts)
        except SieveSwitchError:
            return None


def _bisect_largest(pred, lo_index: int, hi_index: int) -> int | None:
    """Largest k in [lo, hi] with pred(k) true, assuming pred is monotone decreasing."""
    if not pred(lo_index):
        return None
    if pred(hi_index):
        return hi_index
    lo, hi = lo_index, hi_index
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            lo = mid
        else:
            hi = mid
    return lo


def rho_star_for(
    w: WeightSpec,
    route: str = "auto",
    margin_tolerance: float = DEFAULT_MARGIN_TOL,
    sf: SieveFunctions | None = None,
    opts: QuadOptions | None = None,
    coarse: float = 1e-3,
    fine: float = 1e-4,
    params_fn=None,
) -> tuple[float | None, MarginReport | None, float]:
    """Largest admissible rho on the lattice: coarse steps, then bisection to ``fine``.

    ``params_fn`` (rho -> WeightSpec) lets the weight depend on rho, as the
    harman_parameters preset does.
    """
    ev = _Evaluator(route, margin_tolerance, sf or default_functions(), opts or QuadOptions())
    reports: dict[float, MarginReport | None] = {}
    best = -math.inf

    def ok(rho: float) -> bool:
        nonlocal best
        rho = round(rho, 10)
        if rho not in reports:
            weight = params_fn(rho) if params_fn else w
            reports[rho] = ev(diophantine_theta(rho), weight)
            if reports[rho] is not None and math.isfinite(reports[rho].margin):
                best = max(best, reports[rho].margin)
        rep = reports[rho]
        return rep is not None and rep.admissible

    n_coarse = int(round(RHO_MAX / coarse)) - 1
    k = _bisect_largest(lambda i: ok(i * coarse), 0, n_coarse)
    if k is None:
        return None, None, best
    ratio = int(round(coarse / fine))
    base = k * coarse
    j = _bisect_largest(lambda i: ok(base + i * fine), 0, ratio - 1)
    rho = round(base + j * fine, 10)
    return rho, reports[rho], best


def _grid(lo: float, hi: float, n: int, step: float) -> list[float]:
    if n <= 1 or hi <= lo:
        return [round(0.5 * (lo + hi) / step) * step]
    pts = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    return sorted({round(round(p / step) * step, 10) for p in pts})


def max_admissible_rho(
    family: str,
    box: dict,
    S: int = 3,
    grid_points: int = 4,
    steps: dict | None = None,
    route: str = "auto",
    margin_tolerance: float = DEFAULT_MARGIN_TOL,
    sf: SieveFunctions | None = None,
    opts: QuadOptions | None = None,
    threads: int = 1,
    max_sweeps: int = 30,
) -> SearchResult:
    """Coarse grid over the box, then coordinate descent; rho_star by bisection at each point.

    ``box`` maps parameter names (u, v, lam) to (low, high); for the trivial
    family only v is used.  Ties are broken by lexicographic order on
    (rho, u, v, lam) with smaller parameters preferred.
    """
    sf = sf or default_functions()
    names = ["v"] if family == "trivial" else (["u", "v"] if family == "kuhn" else ["u", "v", "lam"])
    for name in names:
        if name not in box:
            raise ConfigError(f"search.box: missing range for {name}")
    steps = {"u": 0.1, "v": 0.1, "lam": 0.01, **(steps or {})}
    cache: dict[tuple, tuple] = {}

    def compute(key: tuple) -> tuple:
        params = dict(zip(names, key))
        if not all(box[n][0] - 1e-12 <= params[n] <= box[n][1] + 1e-12 for n in names):
            return (None, None, -math.inf)
        try:
            w = make_weight(family, params, S)
        except ConfigError:
            return (None, None, -math.inf)
        return rho_star_for(w, route, margin_tolerance, sf, opts)

    def evaluate_all(keys: list[tuple]) -> None:
        todo = [k for k in dict.fromkeys(keys) if k not in cache]
        if threads > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(compute, todo))
        else:
            results = [compute(k) for k in todo]
        cache.update(zip(todo, results))

    def rank(key: tuple) -> tuple:
        rho, _, m = cache[key]
        return (-(rho if rho is not None else -1.0), tuple(key), -m)

    axes = [_grid(box[n][0], box[n][1], grid_points, steps[n]) for n in names]
    keys = [tuple(k) for k in itertools.product(*axes)]
    evaluate_all(keys)
    best = min(keys, key=rank)
    for _ in range(max_sweeps):
        moves = []
        for i, n in enumerate(names):
            for sign in (-1, 1):
                k = list(best)
                k[i] = round(k[i] + sign * steps[n], 10)
                moves.append(tuple(k))
        evaluate_all(moves)
        cand = min([best] + moves, key=rank)
        if cand == best:
            break
        best = cand
    rho, report, _ = cache[best]
    best_margin = max((c[2] for c in cache.values()), default=-math.inf)
    return SearchResult(
        found=rho is not None,
        value=rho,
        params=dict(zip(names, best)),
        report=report,
        best_margin=best_margin,
        evaluations=len(cache),
    )


def min_admissible_theta(
    w: WeightSpec,
    S: int | None = None,
    tol: float = 1e-4,
    route: str = "auto",
    margin_tolerance: float = DEFAULT_MARGIN_TOL,
    sf: SieveFunctions | None = None,
    opts: QuadOptions | None = None,
    lo: float = 0.01,
    hi: float = 0.999,
) -> SearchResult:
    """Smallest constant level theta (bisection to ``tol``) with an admissible margin."""
    if S is not None and S != w.S:
        raise ConfigError(f"S = {S} disagrees with the weight's S = {w.S}")
    sf = sf or default_functions()
    ev = _Evaluator(route, margin_tolerance, sf, opts or QuadOptions())
    best = -math.inf
    # theta * v must stay inside the f/F tables
    hi = min(hi, sf.ff_smax / w.v)

    def run(theta: float) -> MarginReport | None:
        nonlocal best
        rep = ev(ThetaSpec.constant(theta), w)
        if rep is not None and math.isfinite(rep.margin):
            best = max(best, rep.margin)
        return rep

    top = run(hi)
    if top is None or not top.admissible:
        return SearchResult(False, None, w.to_dict(), top, best, ev.count)
    bottom = run(lo)
    if bottom is not None and bottom.admissible:
        return SearchResult(True, lo, w.to_dict(), bottom, best, ev.count)
    good, good_rep = hi, top
    bad = lo
    while good - bad > tol:
        mid = 0.5 * (good + bad)
        rep = run(mid)
        if rep is not None and rep.admissible:
            good, good_rep = mid, rep
        else:
            bad = mid
    return SearchResult(True, good, w.to_dict(), good_rep, best, ev.count)


# -- reproduction suite -----------------------------------------------------------


def _harman_config(rho: float, route: str) -> ScenarioConfig:
    p = harman_parameters(rho)
    return ScenarioConfig("diophantine", richert(p["u"], p["v"], p["lam"]), rho=rho, route=route)


def _cases() -> dict[str, list[tuple[str, ScenarioConfig]]]:
    return {
        "harman-original": [
            ("rho=1/300", _harman_config(1 / 300, "harman_pointwise")),
            ("rho=1/150", _harman_config(1 / 150, "harman_pointwise")),
        ],
        "harman-richert-1-25": [("rho=1/25", _harman_config(1 / 25, "small_r"))],
        "harman-richert-0075": [
            ("rho=0.075", ScenarioConfig("diophantine", richert(4.1, 19.2, 1 / 1.4), rho=0.075, route="small_r"))
        ],
        "harman-trivial": [("rho=1/16", ScenarioConfig("diophantine", trivial(10.8), rho=1 / 16))],
        "harman-kuhn": [("rho=0.092", ScenarioConfig("diophantine", kuhn(6.6, 23.0), rho=0.092))],
        "const-lod-267": [("theta=0.267", ScenarioConfig("constant_lod", kuhn(6.0, 20.0), theta=0.267))],
    }


CASE_IDS = tuple(_cases())


def case_configs(case_id: str) -> list[tuple[str, ScenarioConfig]]:
    cases = _cases()
    if case_id not in cases:
        raise ConfigError(f"unknown case {case_id!r}; expected one of {CASE_IDS}")
    return cases[case_id]


def reproduce(case_id: str, sf: SieveFunctions | None = None) -> list[tuple[str, ScenarioConfig, MarginReport]]:
    return [(name, cfg, evaluate(cfg, sf)) for name, cfg in case_configs(case_id)]
