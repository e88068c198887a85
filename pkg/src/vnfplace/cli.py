"""Command-line entry point.

Exit codes: 0 success, 1 infeasible/failed optimization or failed check,
2 bad usage, config, or input data.  Result lines on stdout are single
lines of ``key=value`` tokens so scripts can parse them.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .costfn import CostFunctionError
from .lpio import LpFormatError
from .net import TopologyError, parse_sndlib
from .oracle import OracleError, oracle_ra, oracle_te
from .paths import PathError
from .scenarios import (
    SCENARIOS,
    ConfigError,
    ScenarioConfig,
    load_config,
    ra_input_from,
    run_pipeline,
    sweep_replicas,
    _load_instance,
)
from .solver import SolverError
from .traffic import TrafficError

_DATA_ERRORS = (
    ConfigError,
    TopologyError,
    TrafficError,
    PathError,
    CostFunctionError,
    LpFormatError,
)


def _apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    patch = {}
    if getattr(args, "scenario", None):
        patch["scenario"] = args.scenario
    if getattr(args, "r_max", None) is not None:
        patch["r_max"] = args.r_max
    if getattr(args, "w_max", None) is not None:
        patch["w_max"] = args.w_max
    if getattr(args, "max_dc", None) is not None:
        patch["max_dc"] = args.max_dc
    if patch:
        cfg = replace(cfg, **patch)
    solver_cfg = dict(cfg.solver_cfg)
    if getattr(args, "backend", None):
        solver_cfg["backend"] = args.backend
    if getattr(args, "time_limit", None) is not None:
        solver_cfg["time_limit_s"] = args.time_limit
    if getattr(args, "gap_tol", None) is not None:
        solver_cfg["gap_tol"] = args.gap_tol
    if solver_cfg != cfg.solver_cfg:
        cfg = replace(cfg, solver_cfg=solver_cfg)
    for req in SCENARIOS[cfg.scenario]["requires"]:
        if getattr(cfg, req) is None:
            raise ConfigError(f"scenario {cfg.scenario} requires {req!r}")
    return cfg


def _add_override_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", help="override the configured scenario")
    p.add_argument("--r-max", dest="r_max", type=int, help="override replica limit")
    p.add_argument("--w-max", dest="w_max", type=int, help="override per-node VNF limit")
    p.add_argument("--max-dc", dest="max_dc", type=int, help="override data-center limit")
    p.add_argument("--backend", choices=["embedded", "external"], help="solver backend")
    p.add_argument("--time-limit", dest="time_limit", type=float, help="seconds per solve")
    p.add_argument("--gap-tol", dest="gap_tol", type=float, help="absolute gap tolerance")


def cmd_validate(args) -> int:
    cfg = load_config(args.config)
    topo, traffic, pathset = _load_instance(cfg)
    print(
        f"validate ok name={cfg.name} scenario={cfg.scenario} "
        f"nodes={len(topo.nodes)} links={len(topo.links)} "
        f"demands={len(traffic.demands)} chains={len(traffic.chains)} "
        f"paths={len(pathset.paths)}"
    )
    return 0


def cmd_run(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    verbose = (lambda m: print(m, file=sys.stderr)) if args.verbose else None
    res = run_pipeline(cfg, out_dir=args.out, log=verbose)
    parts = [f"run ok name={cfg.name} scenario={cfg.scenario} r_max={cfg.r_max}"]
    if res.ra_objective is not None:
        parts.append(f"objective={res.ra_objective!r}")
        parts.append(f"dc_count={res.report['placement']['dc_count']}")
    parts.append(f"util_avg={res.report['utilization']['average']!r}")
    if args.out:
        parts.append(f"out={args.out}")
    print(" ".join(parts))
    return 0


def cmd_sweep(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    try:
        r_values = sorted({int(x) for x in args.replicas.split(",") if x != ""})
    except ValueError:
        raise ConfigError(f"bad --replicas value {args.replicas!r}") from None
    if not r_values:
        raise ConfigError("--replicas needs at least one value")
    verbose = (lambda m: print(m, file=sys.stderr)) if args.verbose else None
    doc = sweep_replicas(cfg, r_values, out_dir=args.out, log=verbose)
    for run in doc["runs"]:
        parts = [
            f"sweep name={cfg.name} scenario={cfg.scenario} r_max={run['r_max']}",
            f"objective={run['objective']!r}",
        ]
        if "dc_count" in run:
            parts.append(f"dc_count={run['dc_count']}")
            parts.append(f"util_avg={run['utilization_average']!r}")
        print(" ".join(parts))
    return 0


def cmd_export_lp(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    stage = args.stage
    if stage == "dimensioning" and not cfg.dimensioning:
        raise ConfigError("config has dimensioning disabled, nothing to export")
    run_pipeline(cfg, out_dir=None, export_lp=(stage, args.out))
    print(f"export-lp ok stage={stage} file={args.out}")
    return 0


def cmd_oracle_check(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    res = run_pipeline(cfg, out_dir=None)
    tol = 1e-6
    checks = []
    if res.traffic.background and "te" in res.report["stages"]:
        te_stage = res.report["stages"]["te"]
        if "objective" in te_stage:
            ref = oracle_te(
                res.topo,
                list(res.traffic.background),
                res.pathset,
                cfg.costfn,
                budget=args.budget,
            )
            checks.append(("te", te_stage["objective"], ref.objective))
    if res.ra_objective is not None:
        inp = ra_input_from(cfg, res.topo, res.traffic, res.pathset, res.u_te)
        ref = oracle_ra(inp, budget=args.budget)
        checks.append(("ra", res.ra_objective, ref.objective))
    if not checks:
        raise ConfigError("nothing to check: no solved TE or placement stage")
    bad = [
        (stage, got, want) for stage, got, want in checks if abs(got - want) > tol
    ]
    fields = " ".join(
        f"{stage}_model={got!r} {stage}_oracle={want!r}" for stage, got, want in checks
    )
    if bad:
        print(f"oracle-check MISMATCH name={cfg.name} {fields}")
        return 1
    print(f"oracle-check ok name={cfg.name} {fields}")
    return 0


def cmd_convert_sndlib(args) -> int:
    try:
        text = Path(args.input).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read {args.input}: {e}") from None
    topo = parse_sndlib(text, name=Path(args.input).stem)
    Path(args.output).write_text(topo.to_text())
    print(
        f"convert-sndlib ok nodes={len(topo.nodes)} links={len(topo.links)} "
        f"file={args.output}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="vnfplace",
        description=(
            "Plan network capacity, background routing, and replicated "
            "service-chain placement over a shared topology."
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a config and its input data")
    p.add_argument("config")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run the full pipeline for one scenario")
    p.add_argument("config")
    p.add_argument("--out", help="directory for report.json and friends")
    p.add_argument("--verbose", action="store_true", help="stage progress on stderr")
    _add_override_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run the pipeline for several replica limits")
    p.add_argument("config")
    p.add_argument("--replicas", required=True, help="comma-separated r_max values")
    p.add_argument("--out", help="directory for per-run outputs and sweep.json")
    p.add_argument("--verbose", action="store_true")
    _add_override_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-lp", help="write one stage's model as an LP file")
    p.add_argument("config")
    p.add_argument("--stage", choices=["dimensioning", "te", "ra"], required=True)
    p.add_argument("--out", required=True, help="LP file to write")
    _add_override_args(p)
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser(
        "oracle-check", help="cross-check solved objectives by full enumeration"
    )
    p.add_argument("config")
    p.add_argument("--budget", type=int, default=1_000_000)
    _add_override_args(p)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("convert-sndlib", help="convert an SNDlib file to native format")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_convert_sndlib)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except _DATA_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OracleError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except SolverError as e:
        print(f"solver: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
