"""The three optimization models: dimensioning, traffic engineering,
service-chain resource allocation with replication.

Naming scheme (LP-safe, deterministic):

===========  =========================  =====================================
prefix       example                    meaning
===========  =========================  =====================================
``Rb``       ``Rb_d3_p1``               demand 3 routed over its candidate
                                        path 1 (dimensioning / TE)
``C``        ``C_l5_t2``                link 5 assigned capacity type 2
``K``        ``K_l4``                   piecewise cost of link 4
``Rs``       ``Rs_s0_p1``               chain 0 activates candidate path 1
``Rls``      ``Rls_s0_d12_p1``          chain-0 demand 12 rides path 1
``F``        ``F_n7_v2_s0``             instance of chain 0's VNF 2 at node 7
``Fn``       ``Fn_n7``                  node 7 hosts at least one VNF (a DC)
===========  =========================  =====================================

Model notes
-----------
* Dimensioning picks one capacity type per link such that the routed load
  never exceeds ``theta`` times the installed capacity, minimizing total
  installed capacity.  (Minimizing utilization alone is constant under a
  one-type-per-link equality, so installed capacity is the cost that
  actually drives the choice — deliberate, documented deviation.)
* TE routes each demand over exactly one candidate path, minimizing the
  summed piecewise link cost ``K_l >= a_i * U_l - b_i``.
* RA routes every chain demand over the chain's admissible path set,
  places each VNF of the chain on every active path in order, and couples
  replica counts to the number of active paths.  Its utilization sits on
  top of the fixed TE background utilization.  Objective:
  ``alpha * sum K_l + beta * sum Fn``.  When ``alpha == 0`` the K
  variables and their cost rows are omitted (objective-inert).
"""

from __future__ import annotations

from dataclasses import dataclass

from .costfn import CostFunction
from .milp import BINARY, CONTINUOUS, SENSE_EQ, SENSE_GE, SENSE_LE, MilpModel
from .net import Topology
from .paths import Path, PathSet
from .traffic import Demand, ServiceChain


class FormulationError(ValueError):
    pass


# ---------------------------------------------------------------------------
# capacity dimensioning
# ---------------------------------------------------------------------------


def build_dimensioning_model(
    topo: Topology,
    demands: list[Demand],
    pathset: PathSet,
    cap_types: tuple[float, ...],
    theta: float,
) -> tuple[MilpModel, dict]:
    """One capacity type per link; every demand on exactly one path;
    load <= theta * installed capacity; minimize installed capacity."""
    if not (0.0 < theta <= 1.0):
        raise FormulationError(f"theta must be in (0, 1], got {theta}")
    if not cap_types:
        raise FormulationError("empty capacity type set")
    t_max = max(cap_types)
    for d in demands:
        if d.volume_gbps > theta * t_max + 1e-9:
            raise FormulationError(
                f"demand {d.id} volume {d.volume_gbps} exceeds theta * largest "
                f"capacity type ({theta * t_max})"
            )
        if d.id not in pathset.per_demand:
            raise FormulationError(f"demand {d.id} has no candidate paths")

    model = MilpModel(name="dimensioning")
    model.register_symbol("Rb", "routing choice: demand over candidate path")
    model.register_symbol("C", "capacity type selector per link")

    r_vars: dict[tuple[int, int], int] = {}
    for d in demands:
        for i, _pid in enumerate(pathset.per_demand[d.id]):
            r_vars[(d.id, i)] = model.add_var(f"Rb_d{d.id}_p{i}", BINARY)
    c_vars: dict[tuple[int, int], int] = {}
    for l in topo.links:
        for ti in range(len(cap_types)):
            c_vars[(l.id, ti)] = model.add_var(f"C_l{l.id}_t{ti}", BINARY)

    for d in demands:
        model.add_constraint(
            f"route_d{d.id}",
            [(r_vars[(d.id, i)], 1.0) for i in range(len(pathset.per_demand[d.id]))],
            SENSE_EQ,
            1.0,
        )
    for l in topo.links:
        model.add_constraint(
            f"onetype_l{l.id}",
            [(c_vars[(l.id, ti)], 1.0) for ti in range(len(cap_types))],
            SENSE_EQ,
            1.0,
        )
    # load terms per link
    on_link: dict[int, list[tuple[int, float]]] = {l.id: [] for l in topo.links}
    for d in demands:
        for i, pid in enumerate(pathset.per_demand[d.id]):
            for lid in pathset.path(pid).link_seq:
                on_link[lid].append((r_vars[(d.id, i)], d.volume_gbps))
    for l in topo.links:
        terms = list(on_link[l.id])
        terms += [(c_vars[(l.id, ti)], -theta * t) for ti, t in enumerate(cap_types)]
        model.add_constraint(f"cap_l{l.id}", terms, SENSE_LE, 0.0)

    model.set_objective(
        [(c_vars[(l.id, ti)], t) for l in topo.links for ti, t in enumerate(cap_types)]
    )
    handles = {"R": r_vars, "C": c_vars, "types": tuple(cap_types), "theta": theta}
    return model, handles


def extract_capacities(
    handles: dict, values: dict[int, float], topo: Topology
) -> dict[int, float]:
    """Chosen capacity per link id from a solved dimensioning model."""
    caps: dict[int, float] = {}
    types = handles["types"]
    for l in topo.links:
        chosen = [ti for ti in range(len(types)) if values[handles["C"][(l.id, ti)]] > 0.5]
        if len(chosen) != 1:
            raise FormulationError(f"link {l.id}: capacity selection not unique")
        caps[l.id] = types[chosen[0]]
    return caps


# ---------------------------------------------------------------------------
# traffic engineering
# ---------------------------------------------------------------------------


def build_te_model(
    topo: Topology,
    demands: list[Demand],
    pathset: PathSet,
    costfn: CostFunction,
) -> tuple[MilpModel, dict]:
    """Unsplittable routing minimizing summed piecewise link costs."""
    for l in topo.links:
        if l.capacity_gbps is None or l.capacity_gbps <= 0:
            raise FormulationError(f"link {l.id} has no usable capacity")
    model = MilpModel(name="traffic_engineering")
    model.register_symbol("Rb", "routing choice: demand over candidate path")
    model.register_symbol("K", "piecewise link cost at link utilization")

    r_vars: dict[tuple[int, int], int] = {}
    for d in demands:
        if d.id not in pathset.per_demand:
            raise FormulationError(f"demand {d.id} has no candidate paths")
        for i, _pid in enumerate(pathset.per_demand[d.id]):
            r_vars[(d.id, i)] = model.add_var(f"Rb_d{d.id}_p{i}", BINARY)
    k_vars = {l.id: model.add_var(f"K_l{l.id}", CONTINUOUS, 0.0) for l in topo.links}

    for d in demands:
        model.add_constraint(
            f"route_d{d.id}",
            [(r_vars[(d.id, i)], 1.0) for i in range(len(pathset.per_demand[d.id]))],
            SENSE_EQ,
            1.0,
        )
    util_terms: dict[int, list[tuple[int, float]]] = {l.id: [] for l in topo.links}
    for d in demands:
        for i, pid in enumerate(pathset.per_demand[d.id]):
            for lid in pathset.path(pid).link_seq:
                cap = topo.links[lid].capacity_gbps
                util_terms[lid].append((r_vars[(d.id, i)], d.volume_gbps / cap))
    for l in topo.links:
        for si, seg in enumerate(costfn.segments):
            terms = [(vid, seg.slope * u) for vid, u in util_terms[l.id]]
            terms.append((k_vars[l.id], -1.0))
            model.add_constraint(f"cost_l{l.id}_s{si}", terms, SENSE_LE, seg.offset)

    model.set_objective([(k_vars[l.id], 1.0) for l in topo.links])
    handles = {"R": r_vars, "K": k_vars}
    return model, handles


def te_utilization(
    topo: Topology,
    demands: list[Demand],
    pathset: PathSet,
    values: dict[int, float],
    handles: dict,
) -> dict[int, float]:
    """Per-link utilization implied by a solved routing."""
    util = {l.id: 0.0 for l in topo.links}
    for d in demands:
        pids = pathset.per_demand[d.id]
        for i, pid in enumerate(pids):
            if values[handles["R"][(d.id, i)]] > 0.5:
                for lid in pathset.path(pid).link_seq:
                    util[lid] += d.volume_gbps / topo.links[lid].capacity_gbps
    return util


# ---------------------------------------------------------------------------
# resource allocation (service chains, replication)
# ---------------------------------------------------------------------------


@dataclass
class RaInput:
    topo: Topology
    chains: list[ServiceChain]
    demands: list[Demand]  # chain demands only
    pathset: PathSet
    costfn: CostFunction
    u_te: dict[int, float]  # fixed background utilization per link id
    alpha: float
    beta: float
    r_max: int
    w_max: int | None = None
    max_dc: int | None = None
    dc_allowed: frozenset[int] | None = None  # None = every node

    def chain_demands(self, chain: ServiceChain) -> list[Demand]:
        by_id = {d.id: d for d in self.demands}
        return [by_id[i] for i in chain.demand_ids]

    def chain_paths(self, chain: ServiceChain) -> list[Path]:
        return [self.pathset.path(pid) for pid in self.pathset.per_chain[chain.id]]

    def node_allowed(self, nid: int) -> bool:
        return self.dc_allowed is None or nid in self.dc_allowed


@dataclass
class Placement:
    """Decoded RA solution."""

    active_paths: dict[int, tuple[int, ...]]  # chain id -> path indices
    demand_paths: dict[int, tuple[int, ...]]  # demand id -> path indices
    assignments: tuple[tuple[int, int, int], ...]  # (node, vnf index, chain)
    used_nodes: tuple[int, ...]

    def to_jsonable(self) -> dict:
        return {
            "active_paths": {str(k): list(v) for k, v in self.active_paths.items()},
            "demand_paths": {str(k): list(v) for k, v in self.demand_paths.items()},
            "assignments": [
                {"node": n, "vnf": v, "chain": s} for n, v, s in self.assignments
            ],
            "used_nodes": list(self.used_nodes),
        }


def build_ra_model(inp: RaInput) -> tuple[MilpModel, dict]:
    """Chain routing + VNF placement on top of fixed background load."""
    if not inp.chains:
        raise FormulationError("resource allocation needs at least one chain")
    if inp.r_max < 0:
        raise FormulationError("r_max must be >= 0")
    if inp.alpha < 0 or inp.beta < 0 or (inp.alpha == 0 and inp.beta == 0):
        raise FormulationError("objective weights must be >= 0 and not both zero")
    if inp.w_max is not None and inp.w_max < 1:
        raise FormulationError("w_max must be >= 1")
    if inp.alpha != 0:
        for l in inp.topo.links:
            if l.capacity_gbps is None or l.capacity_gbps <= 0:
                raise FormulationError(f"link {l.id} has no usable capacity")

    model = MilpModel(name="resource_allocation")
    model.register_symbol("Rs", "chain activates candidate path")
    model.register_symbol("Rls", "chain demand rides candidate path")
    model.register_symbol("F", "VNF instance of a chain at a node")
    model.register_symbol("Fn", "node hosts at least one VNF (data center)")
    if inp.alpha != 0:
        model.register_symbol("K", "piecewise link cost at link utilization")

    nodes = [n.id for n in inp.topo.nodes if inp.node_allowed(n.id)]
    node_ok = set(nodes)
    # W scales the activation lower bound: per-node capacity when given,
    # else the total VNF count (nothing can exceed it on one node).
    W = inp.w_max if inp.w_max is not None else sum(len(c.vnfs) for c in inp.chains)

    rs: dict[tuple[int, int], int] = {}
    rls: dict[tuple[int, int, int], int] = {}
    fv: dict[tuple[int, int, int], int] = {}
    for s in inp.chains:
        paths = inp.chain_paths(s)
        if not paths:
            raise FormulationError(f"chain {s.id} has no candidate paths")
        if len(paths) > inp.r_max + 1:
            raise FormulationError(
                f"chain {s.id} has {len(paths)} candidate paths, "
                f"more than r_max + 1 = {inp.r_max + 1}"
            )
        for i in range(len(paths)):
            rs[(s.id, i)] = model.add_var(f"Rs_s{s.id}_p{i}", BINARY)
    for s in inp.chains:
        for d in inp.chain_demands(s):
            for i in range(len(inp.chain_paths(s))):
                rls[(s.id, d.id, i)] = model.add_var(
                    f"Rls_s{s.id}_d{d.id}_p{i}", BINARY
                )
    for nid in nodes:
        for s in inp.chains:
            for v in range(len(s.vnfs)):
                fv[(nid, v, s.id)] = model.add_var(f"F_n{nid}_v{v}_s{s.id}", BINARY)
    fn = {nid: model.add_var(f"Fn_n{nid}", BINARY) for nid in nodes}
    k_vars = {}
    if inp.alpha != 0:
        k_vars = {
            l.id: model.add_var(f"K_l{l.id}", CONTINUOUS, 0.0) for l in inp.topo.links
        }

    # (c) each chain forwards as many demand-path units as it has demands
    for s in inp.chains:
        dem = inp.chain_demands(s)
        npaths = len(inp.chain_paths(s))
        model.add_constraint(
            f"route_s{s.id}",
            [(rls[(s.id, d.id, i)], 1.0) for d in dem for i in range(npaths)],
            SENSE_EQ,
            float(len(dem)),
        )
    # (d) demands ride only active paths; (e) an active path carries traffic
    for s in inp.chains:
        npaths = len(inp.chain_paths(s))
        for d in inp.chain_demands(s):
            for i in range(npaths):
                model.add_constraint(
                    f"cpl_up_s{s.id}_d{d.id}_p{i}",
                    [(rls[(s.id, d.id, i)], 1.0), (rs[(s.id, i)], -1.0)],
                    SENSE_LE,
                    0.0,
                )
        for i in range(npaths):
            terms = [(rs[(s.id, i)], 1.0)]
            terms += [(rls[(s.id, d.id, i)], -1.0) for d in inp.chain_demands(s)]
            model.add_constraint(f"cpl_dn_s{s.id}_p{i}", terms, SENSE_LE, 0.0)
    # (f) between 1 and r_max + 1 active paths
    for s in inp.chains:
        npaths = len(inp.chain_paths(s))
        terms = [(rs[(s.id, i)], 1.0) for i in range(npaths)]
        model.add_constraint(f"pmin_s{s.id}", terms, SENSE_GE, 1.0)
        model.add_constraint(f"pmax_s{s.id}", terms, SENSE_LE, float(inp.r_max + 1))
    # (g) every VNF of the chain is present on every active path
    for s in inp.chains:
        for i, p in enumerate(inp.chain_paths(s)):
            p_nodes = [n for n in p.node_seq if n in node_ok]
            for v in range(len(s.vnfs)):
                terms = [(rs[(s.id, i)], 1.0)]
                terms += [(fv[(n, v, s.id)], -1.0) for n in p_nodes]
                model.add_constraint(
                    f"place_s{s.id}_p{i}_v{v}", terms, SENSE_LE, 0.0
                )
    # (h) chain order: an instance of VNF v at node n of an active path
    # needs VNF v-1 at n or earlier on that path
    for s in inp.chains:
        for i, p in enumerate(inp.chain_paths(s)):
            for v in range(1, len(s.vnfs)):
                for pos, n in enumerate(p.node_seq):
                    if n not in node_ok:
                        continue
                    prefix = [
                        m for m in p.node_seq[: pos + 1] if m in node_ok
                    ]
                    terms = [(rs[(s.id, i)], 1.0), (fv[(n, v, s.id)], 1.0)]
                    terms += [(fv[(m, v - 1, s.id)], -1.0) for m in prefix]
                    model.add_constraint(
                        f"order_s{s.id}_p{i}_v{v}_n{n}", terms, SENSE_LE, 1.0
                    )
    # (k) replica budget: replicable VNFs at most one instance per active
    # path, others exactly one instance overall
    for s in inp.chains:
        npaths = len(inp.chain_paths(s))
        for v, spec in enumerate(s.vnfs):
            terms = [(fv[(n, v, s.id)], 1.0) for n in nodes]
            if spec.replicable:
                terms += [(rs[(s.id, i)], -1.0) for i in range(npaths)]
                model.add_constraint(f"repl_s{s.id}_v{v}", terms, SENSE_LE, 0.0)
            else:
                model.add_constraint(f"repl_s{s.id}_v{v}", terms, SENSE_LE, 1.0)
    # (l) replicas of inner VNFs may not sit on nodes shared by two active
    # paths (that would collapse the load-splitting the replica exists for)
    for s in inp.chains:
        paths = inp.chain_paths(s)
        inner = [
            v
            for v, spec in enumerate(s.vnfs)
            if spec.replicable and 0 < v < len(s.vnfs) - 1
        ]
        for i in range(len(paths)):
            for j in range(i + 1, len(paths)):
                shared = [
                    n
                    for n in paths[i].node_seq
                    if n in set(paths[j].node_seq) and n in node_ok
                ]
                for n in shared:
                    for v in inner:
                        model.add_constraint(
                            f"excl_s{s.id}_v{v}_n{n}_p{i}_q{j}",
                            [
                                (rs[(s.id, i)], 1.0),
                                (rs[(s.id, j)], 1.0),
                                (fv[(n, v, s.id)], 2.0),
                            ],
                            SENSE_LE,
                            3.0,
                        )
    # (j) node activation; (i) per-node VNF capacity
    for nid in nodes:
        all_f = [
            (fv[(nid, v, s.id)], 1.0)
            for s in inp.chains
            for v in range(len(s.vnfs))
        ]
        model.add_constraint(
            f"act_up_n{nid}",
            all_f + [(fn[nid], -float(W))],
            SENSE_LE,
            0.0,
        )
        model.add_constraint(
            f"act_dn_n{nid}",
            [(fn[nid], 1.0)] + [(vid, -c) for vid, c in all_f],
            SENSE_LE,
            0.0,
        )
        if inp.w_max is not None:
            model.add_constraint(f"wmax_n{nid}", all_f, SENSE_LE, float(inp.w_max))
    # (m) data-center budget
    if inp.max_dc is not None:
        model.add_constraint(
            "maxdc", [(fn[nid], 1.0) for nid in nodes], SENSE_LE, float(inp.max_dc)
        )
    # cost rows on top of the fixed background utilization
    if inp.alpha != 0:
        util_terms: dict[int, list[tuple[int, float]]] = {
            l.id: [] for l in inp.topo.links
        }
        for s in inp.chains:
            for d in inp.chain_demands(s):
                for i, p in enumerate(inp.chain_paths(s)):
                    for lid in p.link_seq:
                        cap = inp.topo.links[lid].capacity_gbps
                        util_terms[lid].append(
                            (rls[(s.id, d.id, i)], d.volume_gbps / cap)
                        )
        for l in inp.topo.links:
            u0 = inp.u_te.get(l.id, 0.0)
            for si, seg in enumerate(inp.costfn.segments):
                terms = [(vid, seg.slope * u) for vid, u in util_terms[l.id]]
                terms.append((k_vars[l.id], -1.0))
                model.add_constraint(
                    f"cost_l{l.id}_s{si}",
                    terms,
                    SENSE_LE,
                    seg.offset - seg.slope * u0,
                )

    obj = []
    if inp.alpha != 0:
        obj += [(k_vars[l.id], inp.alpha) for l in inp.topo.links]
    obj += [(fn[nid], inp.beta) for nid in nodes]
    model.set_objective(obj)
    handles = {"Rs": rs, "Rls": rls, "F": fv, "Fn": fn, "K": k_vars, "W": W}
    return model, handles


def predicted_constraint_counts(inp: RaInput) -> dict[str, int]:
    """Closed-form constraint-family sizes for a RaInput (used by tests)."""
    node_ok = {n.id for n in inp.topo.nodes if inp.node_allowed(n.id)}
    n_nodes = len(node_ok)
    counts = {
        "route": len(inp.chains),
        "cpl_up": 0,
        "cpl_dn": 0,
        "pmin": len(inp.chains),
        "pmax": len(inp.chains),
        "place": 0,
        "order": 0,
        "repl": 0,
        "excl": 0,
        "act_up": n_nodes,
        "act_dn": n_nodes,
        "wmax": n_nodes if inp.w_max is not None else 0,
        "maxdc": 1 if inp.max_dc is not None else 0,
        "cost": len(inp.topo.links) * len(inp.costfn.segments)
        if inp.alpha != 0
        else 0,
    }
    for s in inp.chains:
        paths = inp.chain_paths(s)
        ndem = len(s.demand_ids)
        counts["cpl_up"] += ndem * len(paths)
        counts["cpl_dn"] += len(paths)
        counts["place"] += len(paths) * len(s.vnfs)
        counts["repl"] += len(s.vnfs)
        for p in paths:
            usable = sum(1 for n in p.node_seq if n in node_ok)
            counts["order"] += usable * (len(s.vnfs) - 1)
        inner = [
            v
            for v, spec in enumerate(s.vnfs)
            if spec.replicable and 0 < v < len(s.vnfs) - 1
        ]
        for i in range(len(paths)):
            for j in range(i + 1, len(paths)):
                shared = [
                    n
                    for n in paths[i].node_seq
                    if n in set(paths[j].node_seq) and n in node_ok
                ]
                counts["excl"] += len(shared) * len(inner)
    return counts


def extract_placement(
    inp: RaInput, handles: dict, values: dict[int, float]
) -> Placement:
    """Decode a solved RA model; every binary must be integral to 1e-6."""

    def as_bit(vid: int, what: str) -> int:
        x = values[vid]
        if abs(x - round(x)) > 1e-6:
            raise FormulationError(f"{what} is not integral: {x}")
        return int(round(x))

    active: dict[int, tuple[int, ...]] = {}
    demand_paths: dict[int, tuple[int, ...]] = {}
    for s in inp.chains:
        npaths = len(inp.chain_paths(s))
        active[s.id] = tuple(
            i for i in range(npaths) if as_bit(handles["Rs"][(s.id, i)], "Rs")
        )
        for d in inp.chain_demands(s):
            demand_paths[d.id] = tuple(
                i
                for i in range(npaths)
                if as_bit(handles["Rls"][(s.id, d.id, i)], "Rls")
            )
    assignments = []
    for (nid, v, sid), vid in handles["F"].items():
        if as_bit(vid, "F"):
            assignments.append((nid, v, sid))
    used = tuple(
        nid for nid, vid in handles["Fn"].items() if as_bit(vid, "Fn")
    )
    return Placement(
        active_paths=active,
        demand_paths=demand_paths,
        assignments=tuple(sorted(assignments)),
        used_nodes=used,
    )


def ra_utilization(inp: RaInput, placement: Placement) -> dict[int, float]:
    """Per-link utilization added by the chain traffic of a placement."""
    util = {l.id: 0.0 for l in inp.topo.links}
    by_id = {d.id: d for d in inp.demands}
    for s in inp.chains:
        paths = inp.chain_paths(s)
        for did in s.demand_ids:
            d = by_id[did]
            for i in placement.demand_paths.get(did, ()):
                for lid in paths[i].link_seq:
                    util[lid] += d.volume_gbps / inp.topo.links[lid].capacity_gbps
    return util
