"""Independent validation of chain placements.

This module re-states the placement rules from scratch over plain data
(node sequences, id lists) and shares no constraint-building code with
the optimization models.  It is the second of two independent routes to
the same semantics: a placement accepted here and a model solution are
only trusted when both agree.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass
class ChainData:
    """Plain-data view of one service chain for validation."""

    id: int
    n_vnfs: int
    replicable: tuple[bool, ...]  # per VNF index
    demand_ids: tuple[int, ...]
    paths: tuple[tuple[int, ...], ...]  # candidate path node sequences


def check_placement(
    chains: list[ChainData],
    placement,
    r_max: int,
    w_max: int | None = None,
    max_dc: int | None = None,
    dc_allowed: frozenset[int] | None = None,
) -> list[str]:
    """All rule violations of a placement, as human-readable strings.

    ``placement`` needs attributes ``active_paths`` (chain id -> path
    index tuple), ``demand_paths`` (demand id -> path index tuple),
    ``assignments`` (iterable of (node, vnf index, chain id)) and
    ``used_nodes`` (node id tuple).
    """
    errs: list[str] = []
    by_id = {c.id: c for c in chains}

    def allowed(nid: int) -> bool:
        return dc_allowed is None or nid in dc_allowed

    # --- structural sanity of the assignment list -----------------------
    inst: dict[tuple[int, int], list[int]] = {}  # (chain, vnf) -> nodes
    per_node: dict[int, int] = {}  # node -> total instances
    seen = set()
    for node, v, sid in placement.assignments:
        if sid not in by_id:
            errs.append(f"assignment references unknown chain {sid}")
            continue
        if not 0 <= v < by_id[sid].n_vnfs:
            errs.append(f"chain {sid}: assignment references unknown VNF {v}")
            continue
        if not allowed(node):
            errs.append(f"node {node} hosts a VNF but is not allowed to")
        if (node, v, sid) in seen:
            errs.append(f"duplicate assignment (node {node}, VNF {v}, chain {sid})")
            continue
        seen.add((node, v, sid))
        inst.setdefault((sid, v), []).append(node)
        per_node[node] = per_node.get(node, 0) + 1

    for c in chains:
        act = tuple(placement.active_paths.get(c.id, ()))
        # --- active path count and validity ------------------------------
        if any(not 0 <= i < len(c.paths) for i in act):
            errs.append(f"chain {c.id}: active path index out of range")
            act = tuple(i for i in act if 0 <= i < len(c.paths))
        if len(set(act)) != len(act):
            errs.append(f"chain {c.id}: duplicate active path index")
            act = tuple(sorted(set(act)))
        if not 1 <= len(act) <= r_max + 1:
            errs.append(
                f"chain {c.id}: {len(act)} active paths, allowed 1..{r_max + 1}"
            )
        # --- demand-to-path assignment -----------------------------------
        total = 0
        carried: dict[int, int] = {i: 0 for i in act}
        for did in c.demand_ids:
            for i in placement.demand_paths.get(did, ()):
                total += 1
                if i not in act:
                    errs.append(
                        f"chain {c.id}: demand {did} rides inactive path {i}"
                    )
                else:
                    carried[i] += 1
        if total != len(c.demand_ids):
            errs.append(
                f"chain {c.id}: {total} demand-path assignments, "
                f"need exactly {len(c.demand_ids)}"
            )
        for i in act:
            if carried[i] == 0:
                errs.append(f"chain {c.id}: active path {i} carries no demand")
        # --- per-path VNF presence and ordering ---------------------------
        for i in act:
            seq = c.paths[i]
            hosted_here = {
                v: [n for n in seq if n in inst.get((c.id, v), ())]
                for v in range(c.n_vnfs)
            }
            for v in range(c.n_vnfs):
                if not hosted_here[v]:
                    errs.append(
                        f"chain {c.id}: path {i} is missing VNF {v}"
                    )
            for v in range(1, c.n_vnfs):
                prev = set(inst.get((c.id, v - 1), ()))
                have_prev = False
                for n in seq:
                    if n in prev:
                        have_prev = True
                    if n in inst.get((c.id, v), ()) and not have_prev:
                        errs.append(
                            f"chain {c.id}: path {i} has VNF {v} at node {n} "
                            f"before any VNF {v - 1}"
                        )
        # --- replica budget ------------------------------------------------
        for v in range(c.n_vnfs):
            n_inst = len(inst.get((c.id, v), ()))
            limit = len(act) if c.replicable[v] else 1
            if n_inst > limit:
                errs.append(
                    f"chain {c.id}: VNF {v} has {n_inst} instances, "
                    f"allowed at most {limit}"
                )
        # --- replicas on shared nodes of active path pairs ------------------
        inner = [
            v for v in range(1, c.n_vnfs - 1) if c.replicable[v]
        ]
        for ai in range(len(act)):
            for aj in range(ai + 1, len(act)):
                shared = set(c.paths[act[ai]]) & set(c.paths[act[aj]])
                for v in inner:
                    for n in inst.get((c.id, v), ()):
                        if n in shared:
                            errs.append(
                                f"chain {c.id}: replicable VNF {v} at node {n} "
                                f"shared by active paths {act[ai]} and {act[aj]}"
                            )
    # --- per-node capacity, activation flags, data-center budget ----------
    if w_max is not None:
        for node, k in sorted(per_node.items()):
            if k > w_max:
                errs.append(f"node {node}: {k} VNF instances exceed w_max {w_max}")
    used = set(placement.used_nodes)
    hosting = set(per_node)
    for n in sorted(hosting - used):
        errs.append(f"node {n} hosts VNFs but is not marked as a data center")
    for n in sorted(used - hosting):
        errs.append(f"node {n} is marked as a data center but hosts nothing")
    if max_dc is not None and len(used) > max_dc:
        errs.append(f"{len(used)} data centers exceed max_dc {max_dc}")
    return errs


def chain_data_from(inp) -> list[ChainData]:
    """Adapter from a resource-allocation input to plain validation data."""
    out = []
    for s in inp.chains:
        out.append(
            ChainData(
                id=s.id,
                n_vnfs=len(s.vnfs),
                replicable=tuple(v.replicable for v in s.vnfs),
                demand_ids=tuple(s.demand_ids),
                paths=tuple(
                    tuple(p.node_seq) for p in inp.chain_paths(s)
                ),
            )
        )
    return out
