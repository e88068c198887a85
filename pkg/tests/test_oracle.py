"""Exhaustive reference solvers: hand-computed optima, enumeration
budgets, and agreement with the optimization models on tiny instances."""

import pytest

from conftest import links_by_ends, pathset_for, topo_from_edges
from vnfplace.checker import chain_data_from, check_placement
from vnfplace.costfn import default_cost_function
from vnfplace.formulations import (
    RaInput,
    build_ra_model,
    build_te_model,
    extract_placement,
)
from vnfplace.oracle import (
    OracleBudgetError,
    OracleError,
    oracle_ra,
    oracle_te,
)
from vnfplace.solver import solve_milp
from vnfplace.traffic import CLASS_CHAIN, Demand, ServiceChain, VnfSpec

FN = default_cost_function()


def _vnfs(*reps):
    return tuple(VnfSpec(i, f"v{i}", r) for i, r in enumerate(reps))


def diamond(caps=3.0):
    return topo_from_edges(4, [(0, 1), (1, 3), (0, 2), (2, 3)], caps=caps)


def diamond_ra(
    *,
    alpha,
    beta,
    r_max=1,
    w_max=None,
    max_dc=None,
    u_te=None,
    n_demands=2,
    volumes=None,
    caps=3.0,
    replicable=(False, True, False),
):
    topo = diamond(caps)
    chain = ServiceChain(0, 0, 3, _vnfs(*replicable), tuple(range(n_demands)))
    vols = volumes or [1.0] * n_demands
    demands = [
        Demand(i, 0, 3, vols[i], klass=CLASS_CHAIN, chain_id=0)
        for i in range(n_demands)
    ]
    ps = pathset_for(topo, chain_routes={0: [(0, 1, 3), (0, 2, 3)]})
    return RaInput(
        topo=topo,
        chains=[chain],
        demands=demands,
        pathset=ps,
        costfn=FN,
        u_te=u_te or {},
        alpha=alpha,
        beta=beta,
        r_max=r_max,
        w_max=w_max,
        max_dc=max_dc,
    )


def two_chain_ra(*, n_demands=1, w_max=None, max_dc=None):
    topo = diamond()
    nd = n_demands
    c0 = ServiceChain(0, 0, 3, _vnfs(False, False), tuple(range(nd)))
    c1 = ServiceChain(1, 0, 3, _vnfs(False, False), tuple(range(nd, 2 * nd)))
    demands = [
        Demand(i, 0, 3, 1.0, klass=CLASS_CHAIN, chain_id=0) for i in range(nd)
    ] + [
        Demand(i, 0, 3, 1.0, klass=CLASS_CHAIN, chain_id=1)
        for i in range(nd, 2 * nd)
    ]
    routes = [(0, 1, 3), (0, 2, 3)]
    ps = pathset_for(topo, chain_routes={0: routes, 1: routes})
    return RaInput(
        topo=topo,
        chains=[c0, c1],
        demands=demands,
        pathset=ps,
        costfn=FN,
        u_te={},
        alpha=0.0,
        beta=1.0,
        r_max=1,
        w_max=w_max,
        max_dc=max_dc,
    )


# ---------------------------------------------------------------------------
# routing oracle
# ---------------------------------------------------------------------------


def test_te_single_demand_prefers_direct_path():
    topo = topo_from_edges(3, [(0, 1), (1, 2), (0, 2)], caps=2.0)
    demands = [Demand(0, 0, 2, 1.0)]
    ps = pathset_for(topo, demand_routes={0: [(0, 1, 2), (0, 2)]})
    res = oracle_te(topo, demands, ps, FN)
    # one loaded link at u = 0.5 beats two: envelope(0.5) = 5/6
    assert res.objective == pytest.approx(5.0 / 6.0)
    assert res.witness == {0: 1}
    assert res.evaluated == 2


def test_te_splitting_beats_stacking():
    topo = diamond()
    demands = [Demand(i, 0, 3, 1.0) for i in range(2)]
    routes = [(0, 1, 3), (0, 2, 3)]
    ps = pathset_for(topo, demand_routes={0: routes, 1: routes})
    res = oracle_te(topo, demands, ps, FN)
    # together: 2 links at 2/3 -> 8/3; split: 4 links at 1/3 -> 4/3
    assert res.objective == pytest.approx(4.0 / 3.0)
    assert res.witness == {0: 0, 1: 1}
    assert res.evaluated == 4


def test_te_oracle_matches_te_model():
    topo = topo_from_edges(3, [(0, 1), (1, 2), (0, 2)], caps=2.0)
    demands = [Demand(0, 0, 2, 1.3), Demand(1, 1, 2, 0.7), Demand(2, 0, 1, 0.4)]
    ps = pathset_for(
        topo,
        demand_routes={
            0: [(0, 2), (0, 1, 2)],
            1: [(1, 2), (1, 0, 2)],
            2: [(0, 1), (0, 2, 1)],
        },
    )
    res = oracle_te(topo, demands, ps, FN)
    model, _ = build_te_model(topo, demands, ps, FN)
    sol = solve_milp(model)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(res.objective, abs=1e-9)


def test_te_budget():
    topo = diamond()
    demands = [Demand(i, 0, 3, 1.0) for i in range(2)]
    routes = [(0, 1, 3), (0, 2, 3)]
    ps = pathset_for(topo, demand_routes={0: routes, 1: routes})
    with pytest.raises(OracleBudgetError, match="4 routing combinations"):
        oracle_te(topo, demands, ps, FN, budget=3)


def test_te_input_errors():
    topo = diamond()
    demands = [Demand(0, 0, 3, 1.0), Demand(1, 0, 3, 1.0)]
    ps = pathset_for(topo, demand_routes={0: [(0, 1, 3)]})
    with pytest.raises(OracleError, match="demand 1 has no candidate"):
        oracle_te(topo, demands, ps, FN)
    capless = topo_from_edges(4, [(0, 1), (1, 3), (0, 2), (2, 3)])
    ps = pathset_for(capless, demand_routes={0: [(0, 1, 3)]})
    with pytest.raises(OracleError, match="no usable capacity"):
        oracle_te(capless, [Demand(0, 0, 3, 1.0)], ps, FN)


# ---------------------------------------------------------------------------
# placement oracle
# ---------------------------------------------------------------------------


def test_ra_node_cost_only_stacks_on_one_path():
    res = oracle_ra(diamond_ra(alpha=0.0, beta=1.0))
    assert res.objective == pytest.approx(1.0)
    assert len(res.witness.used_nodes) == 1


def test_ra_per_node_capacity_forces_spreading():
    res = oracle_ra(diamond_ra(alpha=0.0, beta=1.0, w_max=1))
    assert res.objective == pytest.approx(3.0)
    assert len(res.witness.used_nodes) == 3


def test_ra_link_cost_prefers_replication():
    res = oracle_ra(diamond_ra(alpha=1.0, beta=0.0))
    # both demands one path: 2 links at 2/3 -> 8/3; replicated split:
    # 4 links at 1/3 -> 4/3
    assert res.objective == pytest.approx(4.0 / 3.0)
    assert res.witness.active_paths[0] == (0, 1)
    # the replicable middle VNF sits once per path, off the shared ends
    mids = sorted(n for n, v, _s in res.witness.assignments if v == 1)
    assert mids == [1, 2]


def test_ra_mixed_objective_weighs_dc_count_against_links():
    # replication saves 4/3 of link cost but costs 3 extra data centers
    res = oracle_ra(diamond_ra(alpha=1.0, beta=1.0))
    assert res.objective == pytest.approx(8.0 / 3.0 + 1.0)
    assert len(res.witness.used_nodes) == 1


def test_ra_background_superposition():
    inp = diamond_ra(alpha=1.0, beta=0.0)
    lid = links_by_ends(inp.topo)[(0, 1)]
    inp.u_te = {lid: 1.0 / 3.0}
    res = oracle_ra(inp)
    # split: loaded link 0-1 reaches 2/3, the background-only term stays
    # counted; total 4/3 + 3 * 1/3 = 7/3
    assert res.objective == pytest.approx(7.0 / 3.0)


def test_ra_two_chains_share_node_budget():
    res = oracle_ra(two_chain_ra(w_max=2))
    # each chain stacks its two VNFs; w_max forbids one node for all four
    assert res.objective == pytest.approx(2.0)
    with pytest.raises(OracleError, match="no joint configuration"):
        oracle_ra(two_chain_ra(w_max=2, max_dc=1))


def test_ra_witness_passes_checker():
    for inp in [
        diamond_ra(alpha=0.0, beta=1.0),
        diamond_ra(alpha=1.0, beta=0.0),
        diamond_ra(alpha=0.0, beta=1.0, w_max=1),
        two_chain_ra(w_max=2),
    ]:
        res = oracle_ra(inp)
        msgs = check_placement(
            chain_data_from(inp),
            res.witness,
            r_max=inp.r_max,
            w_max=inp.w_max,
            max_dc=inp.max_dc,
            dc_allowed=inp.dc_allowed,
        )
        assert msgs == []


def test_ra_oracle_matches_ra_model():
    cases = [
        diamond_ra(alpha=0.0, beta=1.0),
        diamond_ra(alpha=1.0, beta=0.0),
        diamond_ra(alpha=1.0, beta=1.0),
        diamond_ra(alpha=0.0, beta=1.0, w_max=1),
        diamond_ra(alpha=2.0, beta=0.5, n_demands=3),
        diamond_ra(alpha=0.0, beta=1.0, replicable=(False, True, True, False)),
    ]
    for inp in cases:
        res = oracle_ra(inp)
        model, handles = build_ra_model(inp)
        sol = solve_milp(model, gap_tol=1e-9)
        assert sol.status == "optimal"
        assert sol.objective == pytest.approx(res.objective, abs=1e-9)
        pl = extract_placement(inp, handles, sol.values)
        assert (
            check_placement(
                chain_data_from(inp),
                pl,
                r_max=inp.r_max,
                w_max=inp.w_max,
                max_dc=inp.max_dc,
                dc_allowed=inp.dc_allowed,
            )
            == []
        )


def test_ra_requires_equal_demand_volumes():
    inp = diamond_ra(alpha=0.0, beta=1.0, volumes=[1.0, 2.0])
    with pytest.raises(OracleError, match="chain 0: oracle requires equal"):
        oracle_ra(inp)


def test_ra_budgets():
    # a tiny budget trips during per-chain enumeration ...
    with pytest.raises(OracleBudgetError, match="chain enumeration"):
        oracle_ra(two_chain_ra(n_demands=8), budget=50)
    # ... a moderate one during the joint cross product (52 local
    # evaluations, 33 * 33 joint configurations)
    with pytest.raises(OracleBudgetError, match="joint configurations"):
        oracle_ra(two_chain_ra(n_demands=8), budget=200)
    res = oracle_ra(two_chain_ra(n_demands=8), budget=2000)
    assert res.objective == pytest.approx(1.0)


def test_ra_capacity_required_for_link_costs():
    inp = diamond_ra(alpha=1.0, beta=0.0)
    capless = topo_from_edges(4, [(0, 1), (1, 3), (0, 2), (2, 3)])
    inp.topo = capless
    with pytest.raises(OracleError, match="no usable capacity"):
        oracle_ra(inp)
