"""Exhaustive reference solvers for tiny instances.

These enumerate the full decision space directly from the problem data
— no LP, no constraint matrices — and exist so optimization results can
be cross-checked against an implementation that shares nothing with the
model builders or the simplex/branch-and-bound machinery.

Scope limits (guarded, not silent): enumeration budgets cap the search
space, and the chain oracle requires all demands of a chain to carry
equal volume (which lets demand-to-path assignments collapse to per-path
counts without affecting the optimum).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .costfn import CostFunction
from .formulations import Placement, RaInput
from .net import Topology
from .paths import PathSet
from .traffic import Demand


class OracleError(ValueError):
    pass


class OracleBudgetError(OracleError):
    pass


@dataclass
class OracleResult:
    objective: float
    witness: object  # dict for TE, Placement for chains
    evaluated: int


# ---------------------------------------------------------------------------
# routing oracle
# ---------------------------------------------------------------------------


def oracle_te(
    topo: Topology,
    demands: list[Demand],
    pathset: PathSet,
    costfn: CostFunction,
    budget: int = 1_000_000,
) -> OracleResult:
    """Minimum summed piecewise link cost over every routing combination."""
    demands = sorted(demands, key=lambda d: d.id)
    options = []
    combos = 1
    for d in demands:
        pids = pathset.per_demand.get(d.id)
        if not pids:
            raise OracleError(f"demand {d.id} has no candidate paths")
        combos *= len(pids)
        per_path = []
        for pid in pids:
            load = {}
            for lid in pathset.path(pid).link_seq:
                cap = topo.links[lid].capacity_gbps
                if cap is None or cap <= 0:
                    raise OracleError(f"link {lid} has no usable capacity")
                load[lid] = d.volume_gbps / cap
            per_path.append(load)
        options.append(per_path)
    if combos > budget:
        raise OracleBudgetError(
            f"{combos} routing combinations exceed the budget of {budget}"
        )

    best = None
    best_choice = None
    for choice in itertools.product(*(range(len(o)) for o in options)):
        util: dict[int, float] = {}
        for opt, i in zip(options, choice):
            for lid, u in opt[i].items():
                util[lid] = util.get(lid, 0.0) + u
        cost = sum(costfn.envelope(u) for u in util.values())
        if best is None or cost < best - 1e-15:
            best = cost
            best_choice = choice
    witness = {d.id: i for d, i in zip(demands, best_choice)}
    return OracleResult(objective=best, witness=witness, evaluated=combos)


# ---------------------------------------------------------------------------
# chain placement oracle
# ---------------------------------------------------------------------------


def _chain_configs(inp: RaInput, chain, budget: int, counter: list[int]):
    """Every feasible local configuration of one chain.

    A configuration is (active path indices, per-path demand counts,
    instance node set per VNF).  Yields dicts with the pieces needed for
    joint evaluation: link loads, per-node instance counts, node set.
    """
    paths = inp.chain_paths(chain)
    dem = inp.chain_demands(chain)
    vols = {d.volume_gbps for d in dem}
    if len(vols) > 1:
        raise OracleError(
            f"chain {chain.id}: oracle requires equal demand volumes, got {sorted(vols)}"
        )
    vol = vols.pop()
    nv = len(chain.vnfs)
    configs = []
    for size in range(1, min(inp.r_max + 1, len(paths)) + 1):
        for act in itertools.combinations(range(len(paths)), size):
            act_nodes = [
                [n for n in paths[i].node_seq if inp.node_allowed(n)] for i in act
            ]
            union = sorted({n for seq in act_nodes for n in seq})
            shared = set()
            for ai in range(len(act)):
                for aj in range(ai + 1, len(act)):
                    shared |= set(act_nodes[ai]) & set(act_nodes[aj])

            # candidate instance-node sets per VNF, presence-filtered
            cand: list[list[tuple[int, ...]]] = []
            feasible = True
            for v, spec in enumerate(chain.vnfs):
                cap = size if spec.replicable else 1
                pool = union
                if spec.replicable and 0 < v < nv - 1:
                    pool = [n for n in union if n not in shared]
                subs = []
                for k in range(1, cap + 1):
                    for S in itertools.combinations(pool, k):
                        sset = set(S)
                        if all(sset & set(seq) for seq in act_nodes):
                            subs.append(S)
                if not subs:
                    feasible = False
                    break
                cand.append(subs)
            if not feasible:
                continue

            def order_ok(prev: tuple[int, ...], cur: tuple[int, ...]) -> bool:
                for seq in act_nodes:
                    prevset = set(prev)
                    ok_from = None
                    for pos, n in enumerate(seq):
                        if n in prevset and ok_from is None:
                            ok_from = pos
                        if n in cur and (ok_from is None or pos < ok_from):
                            return False
                return True

            def rec(v: int, chosen: list[tuple[int, ...]]):
                counter[0] += 1
                if counter[0] > budget:
                    raise OracleBudgetError(
                        f"chain enumeration exceeded the budget of {budget}"
                    )
                if v == nv:
                    yield tuple(chosen)
                    return
                for S in cand[v]:
                    if v > 0 and not order_ok(chosen[-1], S):
                        continue
                    chosen.append(S)
                    yield from rec(v + 1, chosen)
                    chosen.pop()

            for sets in rec(0, []):
                for counts in _compositions(len(dem), size):
                    load: dict[int, float] = {}
                    for i, k in zip(act, counts):
                        for lid in paths[i].link_seq:
                            cap_l = inp.topo.links[lid].capacity_gbps
                            load[lid] = load.get(lid, 0.0) + k * vol / cap_l
                    per_node: dict[int, int] = {}
                    for S in sets:
                        for n in S:
                            per_node[n] = per_node.get(n, 0) + 1
                    configs.append(
                        {
                            "act": act,
                            "counts": counts,
                            "sets": sets,
                            "load": load,
                            "per_node": per_node,
                            "nodes": frozenset(per_node),
                        }
                    )
    if not configs:
        raise OracleError(f"chain {chain.id}: no feasible configuration")
    return configs


def _compositions(total: int, parts: int):
    """All ways to write ``total`` as ``parts`` positive integers, ordered."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def oracle_ra(inp: RaInput, budget: int = 1_000_000) -> OracleResult:
    """Minimum placement objective by full enumeration."""
    if inp.alpha != 0:
        for l in inp.topo.links:
            if l.capacity_gbps is None or l.capacity_gbps <= 0:
                raise OracleError(f"link {l.id} has no usable capacity")
    counter = [0]
    chains = sorted(inp.chains, key=lambda c: c.id)
    per_chain = [_chain_configs(inp, c, budget, counter) for c in chains]
    joint = 1
    for cfgs in per_chain:
        joint *= len(cfgs)
    if joint > budget:
        raise OracleBudgetError(
            f"{joint} joint configurations exceed the budget of {budget}"
        )

    link_ids = [l.id for l in inp.topo.links]
    best = None
    best_combo = None
    for combo in itertools.product(*per_chain):
        per_node: dict[int, int] = {}
        for cfg in combo:
            for n, k in cfg["per_node"].items():
                per_node[n] = per_node.get(n, 0) + k
        if inp.w_max is not None and any(k > inp.w_max for k in per_node.values()):
            continue
        used = frozenset(per_node)
        if inp.max_dc is not None and len(used) > inp.max_dc:
            continue
        cost = inp.beta * len(used)
        if inp.alpha != 0:
            for lid in link_ids:
                u = inp.u_te.get(lid, 0.0) + sum(
                    cfg["load"].get(lid, 0.0) for cfg in combo
                )
                cost += inp.alpha * inp.costfn.envelope(u)
        if best is None or cost < best - 1e-15:
            best = cost
            best_combo = combo
    if best is None:
        raise OracleError("no joint configuration satisfies the node budgets")

    # build a witness placement: greedy demand-to-path split per counts
    active: dict[int, tuple[int, ...]] = {}
    demand_paths: dict[int, tuple[int, ...]] = {}
    assignments = []
    for chain, cfg in zip(chains, best_combo):
        active[chain.id] = tuple(cfg["act"])
        dids = list(chain.demand_ids)
        pos = 0
        for i, k in zip(cfg["act"], cfg["counts"]):
            for did in dids[pos : pos + k]:
                demand_paths[did] = (i,)
            pos += k
        for v, S in enumerate(cfg["sets"]):
            for n in S:
                assignments.append((n, v, chain.id))
    used_nodes = tuple(sorted({n for n, _v, _s in assignments}))
    witness = Placement(
        active_paths=active,
        demand_paths=demand_paths,
        assignments=tuple(sorted(assignments)),
        used_nodes=used_nodes,
    )
    return OracleResult(objective=best, witness=witness, evaluated=counter[0])
