"""Config loading and the four-stage pipeline: validation, reports,
determinism, caching, sweeps, LP export."""

import json

import pytest

from vnfplace.lpio import read_lp
from vnfplace.scenarios import (
    ConfigError,
    ScenarioConfig,
    load_config,
    run_pipeline,
    sweep_replicas,
)
from vnfplace.solver import SolverError

BASE = {
    "version": 1,
    "name": "tiny",
    "topology": "net.topo",
    "gateways": {"s_ne": [0], "p_ne_assignment": {"0": 3}},
    "traffic": {
        "background": {"low_gbps": 0.5, "high_gbps": 1.5, "seed": 11},
        "chains": {"demands_per_chain": 2, "volume_gbps": 2.0},
    },
    "k_background": 2,
    "dimensioning": True,
    "scenario": "minNC",
    "r_max": 1,
    "solver": {"backend": "embedded", "gap_tol": 1e-09},
}

DIAMOND_TOPO = """\
node S
node A
node B
node T
link S A
link S B
link A T
link B T
"""


def write_config(tmp_path, overrides=None, drop=(), topo=DIAMOND_TOPO, name="cfg.json"):
    doc = json.loads(json.dumps(BASE))
    for k, v in (overrides or {}).items():
        if isinstance(v, dict) and isinstance(doc.get(k), dict):
            doc[k].update(v)
        else:
            doc[k] = v
    for k in drop:
        doc.pop(k, None)
    (tmp_path / "net.topo").write_text(topo)
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return p


# ---------------------------------------------------------------------------
# config loading
# ---------------------------------------------------------------------------


def test_load_config_defaults(tmp_path):
    cfg = load_config(write_config(tmp_path))
    assert cfg.name == "tiny"
    assert cfg.scenario == "minNC" and cfg.alpha == 0.0 and cfg.beta == 1.0
    assert cfg.theta == pytest.approx(1.0 / 1.2)
    assert cfg.capacity_types == (2.5, 10.0, 40.0, 100.0, 200.0)
    assert cfg.k_background == 2
    assert cfg.r_max == 1 and cfg.w_max is None and cfg.max_dc is None
    assert cfg.costfn.segments[0].slope == 1.0
    assert cfg.solver_cfg["backend"] == "embedded"
    assert cfg.topology_path == tmp_path / "net.topo"


def test_load_config_explicit_knobs(tmp_path):
    p = write_config(
        tmp_path,
        overrides={
            "theta": 0.9,
            "capacity_types_gbps": [5, 20],
            "cost_function": {
                "slopes": [1, 4],
                "breakpoints": [0.5],
            },
            "scenario": "minLB_constr",
            "w_max": 4,
            "max_dc": 2,
            "dc_allowed": [3, 1],
            "solver_overrides": {"ra": {"gap_tol": 1e-07}},
        },
    )
    cfg = load_config(p)
    assert cfg.theta == 0.9
    assert cfg.capacity_types == (5.0, 20.0)
    assert cfg.costfn.breakpoints() == (0.5,)
    assert cfg.alpha == 1.0 and cfg.beta == 0.0
    assert cfg.w_max == 4 and cfg.max_dc == 2
    assert cfg.dc_allowed == (1, 3)
    assert cfg.stage_solver("te")["gap_tol"] == 1e-09
    assert cfg.stage_solver("ra")["gap_tol"] == 1e-07


@pytest.mark.parametrize(
    "overrides,drop,match",
    [
        ({"version": 2}, (), "unsupported config version"),
        ({}, ("name",), "missing required key 'name'"),
        ({}, ("topology",), "missing required key 'topology'"),
        ({}, ("scenario",), "missing required key 'scenario'"),
        ({"traffic": {"background": None, "chains": None}}, (), "background demands, chains, or both"),
        ({"gateways": {"s_ne": [], "p_ne_assignment": {}}}, (), "requires gateways.s_ne"),
        ({"theta": 0.5, "overprovision_factor": 2.0}, (), "not both"),
        ({"overprovision_factor": 0.8}, (), "must be >= 1"),
        ({"theta": 1.5}, (), "theta must be in"),
        ({"theta": 0.0}, (), "theta must be in"),
        ({"scenario": "maxProfit"}, (), "unknown scenario"),
        ({"r_max": -1}, (), "r_max must be >= 0"),
        ({"scenario": "minNC_constr"}, (), "requires 'w_max'"),
        ({"scenario": "minLB_constr", "w_max": 3}, (), "requires 'max_dc'"),
        ({"solver": {"backend": "cloud"}}, (), "unknown solver backend"),
    ],
)
def test_load_config_rejects(tmp_path, overrides, drop, match):
    p = write_config(tmp_path, overrides=overrides, drop=drop)
    with pytest.raises(ConfigError, match=match):
        load_config(p)


def test_load_config_io_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read config"):
        load_config(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(bad)
    arr = tmp_path / "arr.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ConfigError, match="root must be"):
        load_config(arr)


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def test_pipeline_full_run(tmp_path):
    cfg = load_config(write_config(tmp_path))
    out = tmp_path / "out"
    res = run_pipeline(cfg, out_dir=out)

    rep = res.report
    assert rep["config"]["name"] == "tiny"
    assert rep["network"]["nodes"] == 4 and rep["network"]["links"] == 8
    assert rep["traffic"]["background_demands"] == 12
    assert rep["traffic"]["chains"] == 1
    assert rep["traffic"]["chain_demands"] == 2
    # all three stages ran
    assert rep["stages"]["dimensioning"]["objective"] > 0
    assert rep["stages"]["te"]["objective"] >= 0
    assert rep["stages"]["ra"]["objective"] == res.ra_objective
    # dimensioned capacities drawn from the configured types
    assert all(l.capacity_gbps in cfg.capacity_types for l in res.topo.links)
    assert rep["network"]["capacity_total_gbps"] == pytest.approx(
        sum(l.capacity_gbps for l in res.topo.links)
    )
    # chain load sits on top of the background in the total utilization
    assert all(res.u_total[k] >= res.u_te[k] - 1e-12 for k in res.u_te)
    assert rep["utilization"]["max"] >= rep["utilization"]["average"]
    assert sum(rep["utilization"]["histogram"]) == len(res.topo.links)
    # placement metrics mirror the decoded placement
    assert rep["placement"]["dc_count"] == len(res.placement.used_nodes)
    assert rep["placement"]["vnf_instances"] == len(res.placement.assignments)

    assert (out / "report.json").exists()
    assert (out / "placement.json").exists()
    hist = (out / "utilization_hist.csv").read_text().splitlines()
    assert hist[0] == "bin_low,bin_high,links"
    assert len(hist) == 12
    on_disk = json.loads((out / "report.json").read_text())
    assert on_disk == rep


def test_pipeline_background_only(tmp_path):
    p = write_config(
        tmp_path,
        overrides={"traffic": {"chains": None}, "scenario": "minLB"},
        drop=("gateways",),
    )
    res = run_pipeline(load_config(p), out_dir=tmp_path / "out")
    assert res.placement is None and res.ra_objective is None
    assert res.report["stages"]["ra"] == {"skipped": True}
    assert "placement" not in res.report
    assert not (tmp_path / "out" / "placement.json").exists()
    assert res.u_total == res.u_te


def test_pipeline_chains_only_skips_te(tmp_path):
    p = write_config(tmp_path, overrides={"traffic": {"background": None}})
    res = run_pipeline(load_config(p))
    assert res.report["stages"]["te"] == {"skipped": True}
    assert all(u == 0.0 for u in res.u_te.values())
    assert res.ra_objective is not None


def test_pipeline_without_dimensioning_needs_capacities(tmp_path):
    p = write_config(tmp_path, overrides={"dimensioning": False})
    with pytest.raises(ConfigError, match="no capacity"):
        run_pipeline(load_config(p))
    capped = DIAMOND_TOPO.replace("link S A", "link S A 10").replace(
        "link S B", "link S B 10"
    ).replace("link A T", "link A T 10").replace("link B T", "link B T 10")
    p = write_config(tmp_path, overrides={"dimensioning": False}, topo=capped)
    res = run_pipeline(load_config(p))
    assert res.report["stages"]["dimensioning"] == {"skipped": True}
    assert all(l.capacity_gbps == 10.0 for l in res.topo.links)


def test_pipeline_reports_are_deterministic(tmp_path):
    p = write_config(tmp_path)
    run_pipeline(load_config(p), out_dir=tmp_path / "a")
    run_pipeline(load_config(p), out_dir=tmp_path / "b")
    a = (tmp_path / "a" / "report.json").read_bytes()
    b = (tmp_path / "b" / "report.json").read_bytes()
    assert a == b


def test_pipeline_cache_reuse(tmp_path):
    p = write_config(tmp_path)
    cache = tmp_path / "cache"
    logs = []
    first = run_pipeline(load_config(p), cache_dir=cache, log=logs.append)
    assert any("solved" in m for m in logs)
    logs.clear()
    second = run_pipeline(load_config(p), cache_dir=cache, log=logs.append)
    for stage in ("dimensioning", "te", "ra"):
        assert second.report["stages"][stage]["cached"] is True
        assert second.report["stages"][stage]["objective"] == pytest.approx(
            first.report["stages"][stage]["objective"]
        )
    assert all("cache hit" in m for m in logs)
    assert second.placement == first.placement
    # a config change that feeds the stage key misses the cache
    p2 = write_config(tmp_path, overrides={"theta": 0.5}, name="cfg2.json")
    third = run_pipeline(load_config(p2), cache_dir=cache, log=None)
    assert third.report["stages"]["dimensioning"]["cached"] is False


def test_pipeline_solver_override_per_stage(tmp_path):
    p = write_config(
        tmp_path,
        overrides={"solver_overrides": {"te": {"time_limit_s": 0.0}}},
    )
    with pytest.raises(SolverError, match="te stage ended with status time_limit"):
        run_pipeline(load_config(p))


def test_pipeline_infeasible_stage_raises(tmp_path):
    p = write_config(tmp_path, overrides={"max_dc": 0})
    with pytest.raises(SolverError, match="ra stage ended with status infeasible"):
        run_pipeline(load_config(p))


def test_export_lp_stops_before_solving(tmp_path):
    p = write_config(tmp_path)
    for stage in ("dimensioning", "te", "ra"):
        lp = tmp_path / f"{stage}.lp"
        res = run_pipeline(load_config(p), export_lp=(stage, lp))
        assert res.placement is None
        model = read_lp(lp.read_text())
        assert model.constraints and model.vars
        if stage == "dimensioning":
            # stops before solving: no objective recorded for the stage
            assert "objective" not in res.report["stages"].get("dimensioning", {})
            assert any(v.name.startswith("C_l") for v in model.vars)
        if stage == "te":
            assert any(v.name.startswith("K_l") for v in model.vars)
        if stage == "ra":
            assert any(v.name.startswith("Rs_") for v in model.vars)


def test_sweep_replicas(tmp_path):
    p = write_config(tmp_path, overrides={"traffic": {"background": None}})
    out = tmp_path / "sweep"
    doc = sweep_replicas(load_config(p), [1, 0], out_dir=out)
    assert [r["r_max"] for r in doc["runs"]] == [0, 1]
    for run in doc["runs"]:
        assert run["objective"] is not None
        assert run["dc_count"] >= 1
    on_disk = json.loads((out / "sweep.json").read_text())
    assert on_disk == doc
    # per-run artifacts land in r<k> subdirectories
    assert (out / "r0" / "report.json").exists()
    assert (out / "r1" / "report.json").exists()
    # the replica limit never makes the optimum worse
    assert doc["runs"][1]["objective"] <= doc["runs"][0]["objective"] + 1e-9


def test_sweep_shares_stage_cache(tmp_path):
    p = write_config(tmp_path)
    out = tmp_path / "sweep"
    sweep_replicas(load_config(p), [0, 1], out_dir=out)
    r1 = json.loads((out / "r1" / "report.json").read_text())
    # dimensioning and TE don't depend on the replica limit -> cache hits
    assert r1["stages"]["dimensioning"]["cached"] is True
    assert r1["stages"]["te"]["cached"] is True
    assert r1["stages"]["ra"]["cached"] is False


def test_corpus_configs_all_load(corpus_dir):
    configs = sorted(corpus_dir.glob("*.json"))
    assert len(configs) == 15
    for path in configs:
        cfg = load_config(path)
        assert isinstance(cfg, ScenarioConfig)
        assert cfg.topology_path.exists()
