"""Traffic generation: determinism, id layout, chain wiring, serialization."""

import numpy as np
import pytest

from vnfplace.net import Topology, annotate_gateways
from vnfplace.traffic import (
    CLASS_BACKGROUND,
    CLASS_CHAIN,
    DEFAULT_VNF_TEMPLATE,
    Demand,
    ServiceChain,
    TrafficError,
    TrafficSpec,
    VnfSpec,
    build_traffic,
    chains_from_topology,
    gen_background,
    gen_chain_demands,
)

SQUARE = "node A\nnode B\nnode C\nnode D\nlink A B\nlink B C\nlink C D\nlink D A\n"


def test_background_count_and_order():
    topo = Topology.parse(SQUARE)
    demands = gen_background(topo, 0.5, 4.0, seed=7)
    assert len(demands) == 4 * 3
    assert [d.id for d in demands] == list(range(12))
    pairs = [(d.src, d.dst) for d in demands]
    assert pairs == sorted(pairs)  # lexicographic (src, dst) enumeration
    assert all(0.5 <= d.volume_gbps <= 4.0 for d in demands)
    assert all(d.klass == CLASS_BACKGROUND and d.chain_id is None for d in demands)


def test_background_volumes_pinned_by_seed():
    topo = Topology.parse(SQUARE)
    demands = gen_background(topo, 0.5, 4.0, seed=7)
    # contract: exactly one uniform draw per ordered pair, in (src, dst) order
    rng = np.random.default_rng(7)
    expected = []
    for src in range(4):
        for dst in range(4):
            if src != dst:
                expected.append(float(rng.uniform(0.5, 4.0)))
    assert [d.volume_gbps for d in demands] == expected
    again = gen_background(topo, 0.5, 4.0, seed=7)
    assert [d.volume_gbps for d in again] == expected
    other = gen_background(topo, 0.5, 4.0, seed=8)
    assert [d.volume_gbps for d in other] != expected


def test_background_input_validation():
    topo = Topology.parse(SQUARE)
    with pytest.raises(TrafficError):
        gen_background(topo, 0.0, 4.0, seed=1)
    with pytest.raises(TrafficError):
        gen_background(topo, 1.0, -4.0, seed=1)
    with pytest.raises(TrafficError):
        gen_background(topo, 4.0, 1.0, seed=1)


def test_demand_validation():
    with pytest.raises(TrafficError):
        Demand(id=0, src=1, dst=1, volume_gbps=1.0)
    with pytest.raises(TrafficError):
        Demand(id=0, src=0, dst=1, volume_gbps=0.0)
    with pytest.raises(TrafficError):
        Demand(id=0, src=0, dst=1, volume_gbps=1.0, klass="bulk")
    with pytest.raises(TrafficError):
        Demand(id=0, src=0, dst=1, volume_gbps=1.0, klass=CLASS_CHAIN)  # no chain_id
    with pytest.raises(TrafficError):
        Demand(id=0, src=0, dst=1, volume_gbps=1.0, chain_id=3)  # background w/ chain


def _vnfs(*reps):
    return tuple(VnfSpec(index=i, label=f"v{i}", replicable=r) for i, r in enumerate(reps))


def test_chain_validation():
    ServiceChain(id=0, s_ne=0, p_ne=1, vnfs=_vnfs(False, True, False))
    with pytest.raises(TrafficError):
        ServiceChain(id=0, s_ne=0, p_ne=1, vnfs=_vnfs(False))  # < 2 VNFs
    with pytest.raises(TrafficError):
        ServiceChain(id=0, s_ne=0, p_ne=1, vnfs=_vnfs(True, False))  # first replicable
    with pytest.raises(TrafficError):
        ServiceChain(id=0, s_ne=0, p_ne=1, vnfs=_vnfs(False, True))  # last replicable
    with pytest.raises(TrafficError):
        ServiceChain(id=0, s_ne=0, p_ne=0, vnfs=_vnfs(False, False))  # s == p
    bad = (VnfSpec(0, "a", False), VnfSpec(2, "b", False))
    with pytest.raises(TrafficError):
        ServiceChain(id=0, s_ne=0, p_ne=1, vnfs=bad)  # indices not 0..n-1


def test_chains_from_topology_order_and_template():
    topo = annotate_gateways(Topology.parse(SQUARE), [2, 0], {2: 3, 0: 1})
    chains = chains_from_topology(topo)
    # one chain per s-ne in node-id order, regardless of the input order
    assert [(c.id, c.s_ne, c.p_ne) for c in chains] == [(0, 0, 1), (1, 2, 3)]
    assert [(v.label, v.replicable) for v in chains[0].vnfs] == list(DEFAULT_VNF_TEMPLATE)
    custom = chains_from_topology(topo, (("in", False), ("out", False)))
    assert len(custom[0].vnfs) == 2


def test_gen_chain_demands():
    topo = annotate_gateways(Topology.parse(SQUARE), [0], {0: 2})
    chains = chains_from_topology(topo)
    chains, demands = gen_chain_demands(chains, demands_per_chain=3, volume_gbps=2.0, start_id=5)
    assert [d.id for d in demands] == [5, 6, 7]
    assert chains[0].demand_ids == (5, 6, 7)
    assert all(d.volume_gbps == 2.0 for d in demands)
    assert all(d.klass == CLASS_CHAIN and d.chain_id == 0 for d in demands)
    assert all((d.src, d.dst) == (0, 2) for d in demands)
    with pytest.raises(TrafficError):
        gen_chain_demands(chains, demands_per_chain=0, volume_gbps=2.0)
    with pytest.raises(TrafficError):
        gen_chain_demands(chains, demands_per_chain=1, volume_gbps=0.0)


def test_build_traffic_combinations():
    plain = Topology.parse(SQUARE)
    gw = annotate_gateways(plain, [0], {0: 2})

    none = build_traffic(plain, None, None)
    assert none.demands == () and none.chains == () and none.seed is None

    bg = build_traffic(plain, {"low_gbps": 1, "high_gbps": 2, "seed": 3}, None)
    assert len(bg.demands) == 12 and bg.chains == () and bg.seed == 3

    ch = build_traffic(gw, None, {"demands_per_chain": 2, "volume_gbps": 1.5})
    assert len(ch.demands) == 2 and len(ch.chains) == 1 and ch.seed is None

    both = build_traffic(
        gw, {"low_gbps": 1, "high_gbps": 2, "seed": 3},
        {"demands_per_chain": 2, "volume_gbps": 1.5},
    )
    # background demands first, chain demands appended after
    assert len(both.demands) == 14
    assert [d.klass for d in both.demands[:12]] == [CLASS_BACKGROUND] * 12
    assert [d.klass for d in both.demands[12:]] == [CLASS_CHAIN] * 2
    assert both.chains[0].demand_ids == (12, 13)
    assert [d.volume_gbps for d in both.demands[:12]] == [
        d.volume_gbps for d in bg.demands
    ]
    # custom VNF template flows through
    tmpl = build_traffic(gw, None, {
        "demands_per_chain": 1, "volume_gbps": 1.0,
        "vnfs": [["ingress", False], ["egress", False]],
    })
    assert [(v.label, v.replicable) for v in tmpl.chains[0].vnfs] == [
        ("ingress", False), ("egress", False)
    ]


def test_traffic_spec_queries_and_validation():
    gw = annotate_gateways(Topology.parse(SQUARE), [0], {0: 2})
    spec = build_traffic(
        gw, {"low_gbps": 1, "high_gbps": 2, "seed": 3},
        {"demands_per_chain": 2, "volume_gbps": 1.5},
    )
    assert spec.demand(13).chain_id == 0
    assert len(spec.background) == 12
    assert [d.id for d in spec.chain_demands(0)] == [12, 13]

    with pytest.raises(TrafficError, match="duplicate demand id"):
        d = Demand(id=0, src=0, dst=1, volume_gbps=1.0)
        TrafficSpec(demands=(d, d), chains=())
    with pytest.raises(TrafficError, match="unknown demand id"):
        c = ServiceChain(id=0, s_ne=0, p_ne=1, vnfs=_vnfs(False, False), demand_ids=(9,))
        TrafficSpec(demands=(), chains=(c,))
    with pytest.raises(TrafficError, match="not owned"):
        d = Demand(id=9, src=0, dst=1, volume_gbps=1.0, klass=CLASS_CHAIN, chain_id=4)
        c = ServiceChain(id=0, s_ne=0, p_ne=1, vnfs=_vnfs(False, False), demand_ids=(9,))
        TrafficSpec(demands=(d,), chains=(c,))


def test_json_round_trip():
    gw = annotate_gateways(Topology.parse(SQUARE), [0], {0: 2})
    spec = build_traffic(
        gw, {"low_gbps": 0.5, "high_gbps": 4.0, "seed": 11},
        {"demands_per_chain": 3, "volume_gbps": 2.0},
    )
    again = TrafficSpec.from_json(spec.to_json())
    assert again == spec
    assert again.to_json() == spec.to_json()
