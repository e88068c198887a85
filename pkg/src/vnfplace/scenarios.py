"""Scenario configs and the four-stage study pipeline.

Stages: (1) capacity dimensioning over all traffic, (2) traffic
engineering of the background demands on the dimensioned network,
(3) chain placement on top of the fixed background utilization,
(4) metric extraction.  Stage results are cached on disk keyed by a
digest of everything the stage depends on, and the emitted report is
byte-deterministic for a given config (no wall-clock data in it).

Scenario names select the placement objective:

=================  ======  ======  ==========================
name               alpha   beta    extra required limits
=================  ======  ======  ==========================
``minLB``          1       0       —
``minNC``          0       1       —
``minNC_constr``   0       1       ``w_max``
``minLB_constr``   1       0       ``w_max``, ``max_dc``
=================  ======  ======  ==========================
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path as FsPath

from . import checker, formulations, solver
from .costfn import CostFunction, default_cost_function
from .lpio import write_lp
from .net import Topology, annotate_gateways
from .paths import PathSet, build_pathsets
from .traffic import TrafficSpec, build_traffic


class ConfigError(ValueError):
    pass


SCENARIOS = {
    "minLB": {"alpha": 1.0, "beta": 0.0, "requires": ()},
    "minNC": {"alpha": 0.0, "beta": 1.0, "requires": ()},
    "minNC_constr": {"alpha": 0.0, "beta": 1.0, "requires": ("w_max",)},
    "minLB_constr": {"alpha": 1.0, "beta": 0.0, "requires": ("w_max", "max_dc")},
}

DEFAULT_CAPACITY_TYPES = (2.5, 10.0, 40.0, 100.0, 200.0)


@dataclass
class ScenarioConfig:
    name: str
    topology_path: FsPath
    s_ne: tuple[int, ...]
    p_ne_assignment: dict[int, int]
    background: dict | None
    chains_cfg: dict | None
    capacity_types: tuple[float, ...]
    theta: float
    costfn: CostFunction
    k_background: int
    dimensioning: bool
    scenario: str
    r_max: int
    w_max: int | None
    max_dc: int | None
    dc_allowed: tuple[int, ...] | None
    solver_cfg: dict
    solver_overrides: dict = field(default_factory=dict)

    @property
    def alpha(self) -> float:
        return SCENARIOS[self.scenario]["alpha"]

    @property
    def beta(self) -> float:
        return SCENARIOS[self.scenario]["beta"]

    def stage_solver(self, stage: str) -> dict:
        cfg = dict(self.solver_cfg)
        cfg.update(self.solver_overrides.get(stage, {}))
        return cfg


def load_config(path: str | FsPath) -> ScenarioConfig:
    path = FsPath(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    if doc.get("version") != 1:
        raise ConfigError(f"unsupported config version {doc.get('version')!r}")

    def need(key):
        if key not in doc:
            raise ConfigError(f"config is missing required key {key!r}")
        return doc[key]

    name = str(need("name"))
    topo_path = path.parent / str(need("topology"))
    gw = doc.get("gateways") or {}
    s_ne = tuple(int(x) for x in gw.get("s_ne", ()))
    p_ne = {int(k): int(v) for k, v in (gw.get("p_ne_assignment") or {}).items()}

    traffic = need("traffic")
    background = traffic.get("background")
    chains_cfg = traffic.get("chains")
    if background is None and chains_cfg is None:
        raise ConfigError("traffic must define background demands, chains, or both")
    if chains_cfg is not None and not s_ne:
        raise ConfigError("chain traffic requires gateways.s_ne")

    cap_types = tuple(float(t) for t in doc.get("capacity_types_gbps", DEFAULT_CAPACITY_TYPES))
    if "theta" in doc and "overprovision_factor" in doc:
        raise ConfigError("give either theta or overprovision_factor, not both")
    if "theta" in doc:
        theta = float(doc["theta"])
    else:
        ovp = float(doc.get("overprovision_factor", 1.2))
        if ovp < 1.0:
            raise ConfigError(f"overprovision_factor must be >= 1, got {ovp}")
        theta = 1.0 / ovp
    if not 0.0 < theta <= 1.0:
        raise ConfigError(f"theta must be in (0, 1], got {theta}")

    cf = doc.get("cost_function")
    if cf is None:
        costfn = default_cost_function()
    else:
        costfn = CostFunction.from_slopes_breakpoints(
            tuple(float(x) for x in cf["slopes"]),
            tuple(float(x) for x in cf["breakpoints"]),
        )

    scenario = str(need("scenario"))
    if scenario not in SCENARIOS:
        raise ConfigError(
            f"unknown scenario {scenario!r}, expected one of {sorted(SCENARIOS)}"
        )
    r_max = int(doc.get("r_max", 0))
    if r_max < 0:
        raise ConfigError("r_max must be >= 0")
    w_max = doc.get("w_max")
    max_dc = doc.get("max_dc")
    for req in SCENARIOS[scenario]["requires"]:
        if doc.get(req) is None:
            raise ConfigError(f"scenario {scenario} requires {req!r}")
    dc_allowed = doc.get("dc_allowed")
    if dc_allowed is not None:
        dc_allowed = tuple(sorted(int(x) for x in dc_allowed))

    solver_cfg = dict(doc.get("solver") or {})
    solver_cfg.setdefault("backend", "embedded")
    if solver_cfg["backend"] not in ("embedded", "external"):
        raise ConfigError(f"unknown solver backend {solver_cfg['backend']!r}")

    return ScenarioConfig(
        name=name,
        topology_path=topo_path,
        s_ne=s_ne,
        p_ne_assignment=p_ne,
        background=background,
        chains_cfg=chains_cfg,
        capacity_types=cap_types,
        theta=theta,
        costfn=costfn,
        k_background=int(doc.get("k_background", 3)),
        dimensioning=bool(doc.get("dimensioning", True)),
        scenario=scenario,
        r_max=r_max,
        w_max=None if w_max is None else int(w_max),
        max_dc=None if max_dc is None else int(max_dc),
        dc_allowed=dc_allowed,
        solver_cfg=solver_cfg,
        solver_overrides=dict(doc.get("solver_overrides") or {}),
    )


# ---------------------------------------------------------------------------
# stage cache
# ---------------------------------------------------------------------------


def _digest(parts: list) -> str:
    blob = json.dumps(parts, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _cache_load(cache_dir: FsPath, stage: str, key: str) -> dict | None:
    f = cache_dir / f"{stage}-{key}.json"
    if not f.exists():
        return None
    try:
        return json.loads(f.read_text())
    except (OSError, json.JSONDecodeError):
        return None


def _cache_store(cache_dir: FsPath, stage: str, key: str, payload: dict) -> None:
    cache_dir.mkdir(parents=True, exist_ok=True)
    (cache_dir / f"{stage}-{key}.json").write_text(
        json.dumps(payload, sort_keys=True, indent=1)
    )


def _solve_stage(
    model,
    stage: str,
    cfg: ScenarioConfig,
    cache_dir: FsPath | None,
    key_parts: list,
    log,
) -> tuple[dict[int, float], float, dict, bool]:
    """Solve one stage with caching; returns (values, objective, stats, cached)."""
    scfg = cfg.stage_solver(stage)
    key = _digest(key_parts + [sorted(scfg.items())])
    names = {v.name: v.id for v in model.vars}
    if cache_dir is not None:
        hit = _cache_load(cache_dir, stage, key)
        if hit is not None and set(hit["values"]) == set(names):
            if log:
                log(f"[{stage}] cache hit ({key})")
            values = {names[n]: float(x) for n, x in hit["values"].items()}
            return values, float(hit["objective"]), dict(hit["stats"]), True
    sol = solver.solve(model, scfg)
    if sol.status != "optimal":
        raise solver.SolverError(f"{stage} stage ended with status {sol.status}")
    stats = {
        "nodes": sol.stats.nodes,
        "lp_iterations": sol.stats.lp_iterations,
        "best_bound": sol.stats.best_bound,
        "gap": sol.stats.gap,
    }
    if cache_dir is not None:
        by_name = {v.name: sol.values[v.id] for v in model.vars}
        _cache_store(
            cache_dir,
            stage,
            key,
            {"objective": sol.objective, "values": by_name, "stats": stats},
        )
    if log:
        log(
            f"[{stage}] solved: objective={sol.objective:.6g} "
            f"nodes={sol.stats.nodes} lp_iterations={sol.stats.lp_iterations}"
        )
    return sol.values, sol.objective, stats, False


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


@dataclass
class PipelineResult:
    report: dict
    placement: formulations.Placement | None
    topo: Topology  # capacitated
    traffic: TrafficSpec
    pathset: PathSet
    u_te: dict[int, float]
    u_total: dict[int, float]
    ra_objective: float | None


def _load_instance(cfg: ScenarioConfig) -> tuple[Topology, TrafficSpec, PathSet]:
    try:
        text = cfg.topology_path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read topology {cfg.topology_path}: {e}") from None
    topo = Topology.parse(text, name=cfg.topology_path.stem)
    if cfg.s_ne:
        topo = annotate_gateways(topo, cfg.s_ne, cfg.p_ne_assignment)
    traffic = build_traffic(topo, cfg.background, cfg.chains_cfg)
    pathset = build_pathsets(topo, traffic, cfg.k_background, cfg.r_max)
    return topo, traffic, pathset


def _demand_key(demands) -> str:
    return json.dumps(
        [[d.id, d.src, d.dst, d.volume_gbps, d.chain_id] for d in demands]
    )


def ra_input_from(
    cfg: ScenarioConfig,
    topo: Topology,
    traffic: TrafficSpec,
    pathset: PathSet,
    u_te: dict[int, float],
) -> formulations.RaInput:
    return formulations.RaInput(
        topo=topo,
        chains=sorted(traffic.chains, key=lambda c: c.id),
        demands=[d for d in traffic.demands if d.chain_id is not None],
        pathset=pathset,
        costfn=cfg.costfn,
        u_te=u_te,
        alpha=cfg.alpha,
        beta=cfg.beta,
        r_max=cfg.r_max,
        w_max=cfg.w_max,
        max_dc=cfg.max_dc,
        dc_allowed=None if cfg.dc_allowed is None else frozenset(cfg.dc_allowed),
    )


def run_pipeline(
    cfg: ScenarioConfig,
    out_dir: str | FsPath | None = None,
    log=None,
    cache_dir: str | FsPath | None = None,
    export_lp: tuple[str, str | FsPath] | None = None,
) -> PipelineResult:
    out = FsPath(out_dir) if out_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    if cache_dir is None and out is not None:
        cache_dir = out / "cache"
    cache = FsPath(cache_dir) if cache_dir is not None else None
    topo, traffic, pathset = _load_instance(cfg)
    topo_key = topo.to_text()
    # Stage keys cover only what the stage consumes, so e.g. a replica
    # sweep (which changes chain path sets) reuses dimensioning results.
    dump_lines = pathset.dump().splitlines()
    demand_paths_key = "\n".join(l for l in dump_lines if l.startswith("demand:"))
    chain_paths_key = "\n".join(l for l in dump_lines if l.startswith("chain:"))
    chains_key = json.dumps(
        [
            [c.id, c.s_ne, c.p_ne, [[v.label, v.replicable] for v in c.vnfs], list(c.demand_ids)]
            for c in traffic.chains
        ]
    )

    report: dict = {
        "config": {
            "name": cfg.name,
            "scenario": cfg.scenario,
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "r_max": cfg.r_max,
            "w_max": cfg.w_max,
            "max_dc": cfg.max_dc,
            "theta": cfg.theta,
            "k_background": cfg.k_background,
            "capacity_types_gbps": list(cfg.capacity_types),
            "solver_backend": cfg.solver_cfg.get("backend", "embedded"),
        },
        "network": {"nodes": len(topo.nodes), "links": len(topo.links)},
        "traffic": {
            "background_demands": len(traffic.background),
            "chains": len(traffic.chains),
            "chain_demands": sum(len(c.demand_ids) for c in traffic.chains),
            "total_volume_gbps": sum(d.volume_gbps for d in traffic.demands),
        },
        "stages": {},
    }

    def _maybe_export(stage: str, model) -> bool:
        if export_lp is not None and export_lp[0] == stage:
            FsPath(export_lp[1]).write_text(write_lp(model))
            return True
        return False

    # ---- stage 1: dimensioning -------------------------------------------
    all_demands = sorted(traffic.demands, key=lambda d: d.id)
    if cfg.dimensioning:
        model, handles = formulations.build_dimensioning_model(
            topo, all_demands, pathset, cfg.capacity_types, cfg.theta
        )
        if _maybe_export("dimensioning", model):
            return PipelineResult(report, None, topo, traffic, pathset, {}, {}, None)
        values, obj, stats, cached = _solve_stage(
            model,
            "dimensioning",
            cfg,
            cache,
            [
                topo_key,
                _demand_key(all_demands),
                demand_paths_key,
                list(cfg.capacity_types),
                cfg.theta,
            ],
            log,
        )
        caps = formulations.extract_capacities(handles, values, topo)
        topo = topo.with_capacities(caps)
        report["stages"]["dimensioning"] = {
            "objective": obj,
            "stats": stats,
            "cached": cached,
        }
    else:
        missing = [l.id for l in topo.links if l.capacity_gbps is None]
        if missing:
            raise ConfigError(
                f"dimensioning is off but links {missing} have no capacity"
            )
        report["stages"]["dimensioning"] = {"skipped": True}
    topo_key = topo.to_text()
    by_type: dict[str, int] = {}
    for l in topo.links:
        k = repr(l.capacity_gbps)
        by_type[k] = by_type.get(k, 0) + 1
    report["network"]["capacity_by_type"] = by_type
    report["network"]["capacity_total_gbps"] = sum(
        l.capacity_gbps for l in topo.links
    )

    # ---- stage 2: background traffic engineering --------------------------
    background = sorted(traffic.background, key=lambda d: d.id)
    u_te = {l.id: 0.0 for l in topo.links}
    if background:
        model, handles = formulations.build_te_model(
            topo, background, pathset, cfg.costfn
        )
        if _maybe_export("te", model):
            return PipelineResult(report, None, topo, traffic, pathset, {}, {}, None)
        values, obj, stats, cached = _solve_stage(
            model,
            "te",
            cfg,
            cache,
            [topo_key, _demand_key(background), demand_paths_key, cfg.costfn.to_jsonable()],
            log,
        )
        u_te = formulations.te_utilization(topo, background, pathset, values, handles)
        report["stages"]["te"] = {"objective": obj, "stats": stats, "cached": cached}
    else:
        report["stages"]["te"] = {"skipped": True}

    # ---- stage 3: chain placement -----------------------------------------
    placement = None
    ra_objective = None
    u_total = dict(u_te)
    if traffic.chains:
        inp = ra_input_from(cfg, topo, traffic, pathset, u_te)
        model, handles = formulations.build_ra_model(inp)
        if _maybe_export("ra", model):
            return PipelineResult(report, None, topo, traffic, pathset, u_te, {}, None)
        values, obj, stats, cached = _solve_stage(
            model,
            "ra",
            cfg,
            cache,
            [
                topo_key,
                chains_key,
                _demand_key(inp.demands),
                chain_paths_key,
                cfg.costfn.to_jsonable(),
                sorted((str(k), v) for k, v in u_te.items()),
                cfg.alpha,
                cfg.beta,
                cfg.r_max,
                cfg.w_max,
                cfg.max_dc,
                list(cfg.dc_allowed) if cfg.dc_allowed is not None else None,
            ],
            log,
        )
        placement = formulations.extract_placement(inp, handles, values)
        errs = checker.check_placement(
            checker.chain_data_from(inp),
            placement,
            r_max=cfg.r_max,
            w_max=cfg.w_max,
            max_dc=cfg.max_dc,
            dc_allowed=None if cfg.dc_allowed is None else frozenset(cfg.dc_allowed),
        )
        if errs:
            raise solver.SolverError(
                "placement failed independent validation: " + "; ".join(errs)
            )
        ra_objective = obj
        u_ra = formulations.ra_utilization(inp, placement)
        u_total = {lid: u_te[lid] + u_ra[lid] for lid in u_te}
        report["stages"]["ra"] = {"objective": obj, "stats": stats, "cached": cached}
        report["placement"] = _placement_metrics(inp, placement)
    else:
        report["stages"]["ra"] = {"skipped": True}

    report["utilization"] = _utilization_metrics(u_total, u_te)
    if out is not None:
        _emit(out, report, placement, pathset, traffic, u_total)
    return PipelineResult(
        report=report,
        placement=placement,
        topo=topo,
        traffic=traffic,
        pathset=pathset,
        u_te=u_te,
        u_total=u_total,
        ra_objective=ra_objective,
    )


def _placement_metrics(inp: formulations.RaInput, placement) -> dict:
    n_inst = len(placement.assignments)
    dcs = len(placement.used_nodes)
    vol = 0.0
    hop_vol = 0.0
    by_id = {d.id: d for d in inp.demands}
    for s in inp.chains:
        paths = inp.chain_paths(s)
        for did in s.demand_ids:
            d = by_id[did]
            for i in placement.demand_paths.get(did, ()):
                vol += d.volume_gbps
                hop_vol += d.volume_gbps * paths[i].hops
    return {
        "dc_count": dcs,
        "vnf_instances": n_inst,
        "avg_vnfs_per_dc": (n_inst / dcs) if dcs else None,
        "avg_path_hops": (hop_vol / vol) if vol else None,
        "active_paths_per_chain": {
            str(cid): len(v) for cid, v in sorted(placement.active_paths.items())
        },
        "used_nodes": list(placement.used_nodes),
    }


def _utilization_metrics(u_total: dict[int, float], u_te: dict[int, float]) -> dict:
    vals = [u_total[k] for k in sorted(u_total)]
    hist = [0] * 11
    for u in vals:
        hist[min(int(u * 10), 10)] += 1
    return {
        "average": sum(vals) / len(vals) if vals else 0.0,
        "max": max(vals) if vals else 0.0,
        "background_average": (
            sum(u_te.values()) / len(u_te) if u_te else 0.0
        ),
        "histogram_bin_width": 0.1,
        "histogram": hist,
    }


def _emit(out: FsPath, report: dict, placement, pathset, traffic, u_total) -> None:
    (out / "report.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    hist = report["utilization"]["histogram"]
    rows = ["bin_low,bin_high,links"]
    for i, n in enumerate(hist):
        hi = "inf" if i == 10 else repr((i + 1) / 10)
        rows.append(f"{repr(i / 10)},{hi},{n}")
    (out / "utilization_hist.csv").write_text("\n".join(rows) + "\n")
    if placement is not None:
        doc = placement.to_jsonable()
        doc["chain_paths"] = {
            str(c.id): [list(pathset.path(pid).node_seq) for pid in pathset.per_chain[c.id]]
            for c in traffic.chains
        }
        (out / "placement.json").write_text(
            json.dumps(doc, sort_keys=True, indent=2) + "\n"
        )


def sweep_replicas(
    cfg: ScenarioConfig, r_values: list[int], out_dir: str | FsPath | None = None, log=None
) -> dict:
    """Run the pipeline for several replica limits; shared stages hit cache."""
    out = FsPath(out_dir) if out_dir is not None else None
    cache = out / "cache" if out is not None else None
    runs = []
    for r in sorted(r_values):
        sub = replace(cfg, r_max=int(r))
        sub_out = out / f"r{int(r)}" if out is not None else None
        res = run_pipeline(sub, out_dir=sub_out, log=log, cache_dir=cache)
        entry = {"r_max": int(r), "objective": res.ra_objective}
        if res.placement is not None:
            entry["dc_count"] = len(res.placement.used_nodes)
            entry["vnf_instances"] = len(res.placement.assignments)
            entry["utilization_average"] = res.report["utilization"]["average"]
            entry["utilization_max"] = res.report["utilization"]["max"]
        runs.append(entry)
    doc = {"name": cfg.name, "scenario": cfg.scenario, "runs": runs}
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.json").write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return doc
