"""Command-line front end: tables, single scenarios, searches and the reproduction suite."""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .bounds import MarginReport, margin
from .errors import BudgetExceededError, ConfigError, OutOfRangeError, SieveSwitchError
from .scenarios import (
    CASE_IDS,
    SCHEMA_VERSION,
    ScenarioConfig,
    case_configs,
    diophantine_theta,
    evaluate,
    max_admissible_rho,
    min_admissible_theta,
)
from .sievefn import SieveFunctions
from .sievefn.cache import MANIFEST, StaleCacheError, load_cache, save_cache

CACHE_ENV = "SIEVESWITCH_CACHE"

EXIT_OK = 0
EXIT_NOT_ADMISSIBLE = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3


def _cache_dir(args) -> Path | None:
    raw = getattr(args, "cache", None) or os.environ.get(CACHE_ENV)
    return Path(raw) if raw else None


def load_functions(args) -> tuple[SieveFunctions, dict | None]:
    """Tables from the cache directory if one is configured, else built lazily in memory."""
    directory = _cache_dir(args)
    if directory is None or not (directory / MANIFEST).exists():
        return SieveFunctions(), None
    try:
        return load_cache(directory)
    except StaleCacheError as exc:
        if getattr(args, "force", False):
            funcs = SieveFunctions()
            return funcs, save_cache(funcs, directory)
        raise ConfigError(f"cache: {exc}; rerun `sieveswitch tabulate --out {directory} --force`") from exc


def table_provenance(funcs: SieveFunctions, manifest: dict | None) -> list[dict]:
    out = []
    for t in sorted(funcs.tables(), key=lambda t: (t.kind, t.index_j or 0)):
        out.append(
            {
                "kind": t.kind,
                "index_j": t.index_j,
                "grid_step": t.grid_step,
                "s_max": t.s_max,
                "refinement_level": t.refinement_level,
                "values_sha256": hashlib.sha256(t.values.tobytes()).hexdigest(),
            }
        )
    return out


def _read_config(path: str) -> ScenarioConfig:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config: file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object")
    return ScenarioConfig.from_dict(data)


def _write_json(path: str, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _report_entry(name: str, cfg: ScenarioConfig, rep: MarginReport, timing: float | None) -> dict:
    d = {"name": name, "config": cfg.to_dict(), "report": rep.to_dict()}
    if timing is not None:
        d["wall_seconds"] = timing
    return d


def _print_table(rows: list[tuple[str, MarginReport]]) -> None:
    print(f"{'case':32s} {'route':16s} {'sigma1':>12s} {'sigma2':>12s} {'margin':>12s} {'error':>9s}  verdict")
    for name, r in rows:
        verdict = "admissible" if r.admissible else "NOT admissible"
        print(
            f"{name:32s} {r.route:16s} {r.sigma1:12.6f} {r.sigma2:12.6f} {r.margin:12.6f} "
            f"{r.error_estimate:9.1e}  {verdict}"
        )
        for w in r.warnings:
            print(f"    warning: {w}")


# -- subcommands -------------------------------------------------------------------


def cmd_eval_fn(args) -> int:
    funcs, _ = load_functions(args)
    s = args.s
    if args.fn == "f":
        val = funcs.f(s)
    elif args.fn == "F":
        val = funcs.F(s)
    elif args.fn == "omega":
        val = funcs.buchstab(s)
    else:
        if args.j is None:
            raise ConfigError("--j: required for c and C")
        val = funcs.little_c(args.j, s) if args.fn == "c" else funcs.big_C(args.j, s)
    print(repr(float(val)))
    return EXIT_OK


def cmd_tabulate(args) -> int:
    out = Path(args.out)
    if (out / MANIFEST).exists() and not args.force:
        try:
            load_cache(out)
            print(f"cache at {out} is up to date (use --force to rebuild)")
            return EXIT_OK
        except StaleCacheError as exc:
            print(f"stale cache: {exc}; rebuilding", file=sys.stderr)
    funcs = SieveFunctions(
        ff_smax=args.ff_smax, omega_smax=args.omega_smax, j_max=args.j_max, grid_step=args.grid_step
    )
    manifest = save_cache(funcs, out)
    if args.csv:
        from .sievefn.cache import export_csv, table_filename

        for t in funcs.tables():
            export_csv(t, out / (Path(table_filename(t)).stem + ".csv"))
    print(f"wrote {len(manifest['tables'])} tables to {out}")
    return EXIT_OK


def _sweep_rhos(spec: str) -> list[float]:
    try:
        lo, hi, step = (float(x) for x in spec.split(":"))
    except ValueError as exc:
        raise ConfigError(f"--sweep-range: expected LO:HI:STEP, got {spec!r}") from exc
    n = int(round((hi - lo) / step))
    return [round(lo + i * step, 12) for i in range(n + 1)]


def cmd_margin(args) -> int:
    cfg = _read_config(args.config)
    funcs, manifest = load_functions(args)
    t0 = time.perf_counter()
    rep = evaluate(cfg, funcs)
    elapsed = time.perf_counter() - t0
    _print_table([("config", rep)])
    if args.sweep:
        if cfg.scenario_kind != "diophantine":
            raise ConfigError("--sweep: only defined for the diophantine scenario")
        with open(args.sweep, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["rho", "sigma1", "sigma2", "margin"])
            for rho in _sweep_rhos(args.sweep_range):
                r = margin(diophantine_theta(rho), cfg.weight, route=cfg.route,
                           margin_tolerance=cfg.margin_tolerance, sf=funcs, opts=cfg.quad, R=cfg.R, R0=cfg.R0)
                writer.writerow([repr(rho), repr(r.sigma1), repr(r.sigma2), repr(r.margin)])
    if args.json:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "results": [_report_entry("config", cfg, rep, elapsed if args.timings else None)],
            "tables": table_provenance(funcs, manifest),
        }
        _write_json(args.json, payload)
    return EXIT_OK if rep.admissible else EXIT_NOT_ADMISSIBLE


def cmd_optimize(args) -> int:
    cfg = _read_config(args.config)
    funcs, manifest = load_functions(args)
    search = cfg.search or {}
    if cfg.scenario_kind == "diophantine":
        if "box" not in search:
            raise ConfigError("search.box: required to optimize a diophantine scenario")
        box = {k: tuple(v) for k, v in search["box"].items()}
        result = max_admissible_rho(
            cfg.weight.family,
            box,
            S=cfg.S,
            grid_points=int(search.get("grid_points", 4)),
            steps=search.get("steps"),
            route=cfg.route,
            margin_tolerance=cfg.margin_tolerance,
            sf=funcs,
            opts=cfg.quad,
            threads=args.threads,
        )
        label = "rho_star"
    elif cfg.scenario_kind == "constant_lod":
        result = min_admissible_theta(
            cfg.weight,
            tol=float(search.get("tol", 1e-4)),
            route=cfg.route,
            margin_tolerance=cfg.margin_tolerance,
            sf=funcs,
            opts=cfg.quad,
        )
        label = "theta_star"
    else:
        raise ConfigError("scenario_kind: optimize supports diophantine and constant_lod only")
    if result.found:
        print(f"{label} = {result.value:.4f} at {result.params}")
        if result.report is not None:
            _print_table([(label, result.report)])
    else:
        print(f"no admissible point found; best margin seen {result.best_margin:.6g}")
    if args.json:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "config": cfg.to_dict(),
            "objective": label,
            "result": result.to_dict(),
            "tables": table_provenance(funcs, manifest),
        }
        _write_json(args.json, payload)
    return EXIT_OK if result.found else EXIT_NOT_ADMISSIBLE


def cmd_reproduce(args) -> int:
    if args.all:
        ids = list(CASE_IDS)
    elif args.case:
        ids = list(args.case)
    else:
        raise ConfigError("reproduce: give --case ID or --all")
    jobs = [(f"{cid}:{name}", cfg) for cid in ids for name, cfg in case_configs(cid)]
    funcs, manifest = load_functions(args)

    def run(job):
        name, cfg = job
        t0 = time.perf_counter()
        rep = evaluate(cfg, funcs)
        return rep, time.perf_counter() - t0

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(j) for j in jobs]
    _print_table([(name, rep) for (name, _), (rep, _) in zip(jobs, outcomes)])
    if args.json:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "results": [
                _report_entry(name, cfg, rep, dt if args.timings else None)
                for (name, cfg), (rep, dt) in zip(jobs, outcomes)
            ],
            "tables": table_provenance(funcs, manifest),
        }
        _write_json(args.json, payload)
    ok = all(rep.admissible for rep, _ in outcomes)
    return EXIT_OK if ok else EXIT_NOT_ADMISSIBLE


# -- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sieveswitch", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache", help=f"table cache directory (default: ${CACHE_ENV})")
    common.add_argument("--force", action="store_true", help="rebuild a stale cache instead of failing")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval-fn", parents=[common], help="evaluate one special function")
    e.add_argument("--fn", required=True, choices=["f", "F", "omega", "c", "C"])
    e.add_argument("--j", type=int)
    e.add_argument("--s", type=float, required=True)
    e.set_defaults(func=cmd_eval_fn)

    t = sub.add_parser("tabulate", help="build and cache all tables")
    t.add_argument("--out", required=True)
    t.add_argument("--force", action="store_true")
    t.add_argument("--csv", action="store_true", help="also export s,value CSV files")
    t.add_argument("--ff-smax", type=float, default=12.0)
    t.add_argument("--omega-smax", type=float, default=30.0)
    t.add_argument("--j-max", type=int, default=8)
    t.add_argument("--grid-step", type=float, default=1e-3)
    t.set_defaults(func=cmd_tabulate)

    m = sub.add_parser("margin", parents=[common], help="evaluate one scenario")
    m.add_argument("--config", required=True)
    m.add_argument("--json", help="write the machine report here")
    m.add_argument("--sweep", help="write a rho,sigma1,sigma2,margin CSV here")
    m.add_argument("--sweep-range", default="0.005:0.15:0.005", help="LO:HI:STEP for --sweep")
    m.add_argument("--timings", action="store_true", help="include wall-clock timings in the JSON")
    m.set_defaults(func=cmd_margin)

    o = sub.add_parser("optimize", parents=[common], help="search for rho_star or theta_star")
    o.add_argument("--config", required=True)
    o.add_argument("--json")
    o.add_argument("--threads", type=int, default=1)
    o.set_defaults(func=cmd_optimize)

    r = sub.add_parser("reproduce", parents=[common], help="run the fixed reproduction suite")
    g = r.add_mutually_exclusive_group()
    g.add_argument("--case", action="append", choices=CASE_IDS)
    g.add_argument("--all", action="store_true")
    r.add_argument("--json")
    r.add_argument("--threads", type=int, default=1)
    r.add_argument("--timings", action="store_true")
    r.set_defaults(func=cmd_reproduce)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except (ConfigError, OutOfRangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceededError as exc:
        print(f"budget failure: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SieveSwitchError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
