"""Candidate-path enumeration: k-shortest and link-disjoint path sets.

All path computations use hop count as the metric and are deterministic:
ties between equal-length paths are broken by lexicographic node-id
sequence.  Paths are loopless (simple).

Background demands receive up to ``k`` shortest paths.  A service chain
receives a link-disjoint set, greedily selected shortest-first: the
shortest path, then the shortest path sharing no directed link with any
already selected path, and so on.  (This equals scanning the k-shortest
enumeration for "shortest disjoint from all selected" under the same
tie-break, and is computed by re-running the shortest-path search on the
graph minus the used links.)
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .net import Topology
from .traffic import TrafficSpec


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class Path:
    """A simple directed path.  ``owner`` is ("demand", id) or ("chain", id)."""

    id: int
    owner: tuple[str, int]
    node_seq: tuple[int, ...]
    link_seq: tuple[int, ...]

    @property
    def hops(self) -> int:
        return len(self.link_seq)

    def traverses(self, link_id: int) -> bool:
        return link_id in self.link_seq


@dataclass(frozen=True)
class PathSet:
    """Candidate paths for every demand and chain of an instance."""

    paths: tuple[Path, ...]
    per_demand: dict[int, tuple[int, ...]]  # demand id -> path ids
    per_chain: dict[int, tuple[int, ...]]  # chain id -> path ids

    def path(self, pid: int) -> Path:
        return self.paths[pid]

    def dump(self) -> str:
        """One line per path: owner tab dash-joined node ids."""
        lines = []
        for p in self.paths:
            kind, oid = p.owner
            lines.append(f"{kind}:{oid}\t{'-'.join(str(n) for n in p.node_seq)}")
        return "\n".join(lines) + "\n"


def _links_between(topo: Topology) -> dict[tuple[int, int], int]:
    return {(l.src, l.dst): l.id for l in topo.links}


def shortest_path_nodes(
    topo: Topology,
    src: int,
    dst: int,
    banned_nodes: frozenset[int] = frozenset(),
    banned_links: frozenset[int] = frozenset(),
) -> tuple[int, ...] | None:
    """Lexicographically-smallest shortest path by hop count, or None.

    BFS from ``dst`` over reversed allowed links gives each node its
    distance-to-destination; the path is then grown from ``src`` by always
    stepping to the smallest-id neighbor that is one hop closer.
    """
    if src in banned_nodes or dst in banned_nodes:
        return None
    # reverse adjacency restricted to allowed links/nodes
    dist = {dst: 0}
    frontier = [dst]
    rev: dict[int, list[int]] = {n.id: [] for n in topo.nodes}
    for l in topo.links:
        if l.id in banned_links or l.src in banned_nodes or l.dst in banned_nodes:
            continue
        rev[l.dst].append(l.src)
    while frontier:
        nxt = []
        for u in frontier:
            for v in rev[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    if src not in dist:
        return None
    seq = [src]
    cur = src
    while cur != dst:
        best = None
        for lid in topo.out_links(cur):
            l = topo.links[lid]
            if lid in banned_links or l.dst in banned_nodes:
                continue
            if dist.get(l.dst) == dist[cur] - 1 and (best is None or l.dst < best):
                best = l.dst
        # a node with finite dist always has such a neighbor
        seq.append(best)
        cur = best
    return tuple(seq)


def _nodes_to_links(topo: Topology, seq: tuple[int, ...]) -> tuple[int, ...]:
    lut = _links_between(topo)
    return tuple(lut[(a, b)] for a, b in zip(seq, seq[1:]))


def k_shortest(topo: Topology, src: int, dst: int, k: int) -> list[tuple[int, ...]]:
    """Up to ``k`` loopless paths in nondecreasing hop count (Yen).

    Ties are broken by lexicographic node sequence; the result order is the
    total order (hops, node_seq).  Raises PathError if ``dst`` is
    unreachable from ``src``.
    """
    if k < 1:
        raise PathError("k must be >= 1")
    first = shortest_path_nodes(topo, src, dst)
    if first is None:
        raise PathError(
            f"no path from {topo.nodes[src].name} to {topo.nodes[dst].name}"
        )
    lut = _links_between(topo)
    found = [first]
    # candidate heap keyed by (hops, node sequence) for deterministic pops
    cand: list[tuple[int, tuple[int, ...]]] = []
    seen = {first}
    while len(found) < k:
        prev = found[-1]
        for i in range(len(prev) - 1):
            root = prev[: i + 1]
            spur = prev[i]
            banned_links = set()
            for q in found:
                if q[: i + 1] == root and len(q) > i + 1:
                    banned_links.add(lut[(q[i], q[i + 1])])
            banned_nodes = frozenset(root[:-1])
            tail = shortest_path_nodes(
                topo, spur, dst, banned_nodes, frozenset(banned_links)
            )
            if tail is None:
                continue
            full = root[:-1] + tail
            if full not in seen:
                seen.add(full)
                heapq.heappush(cand, (len(full) - 1, full))
        if not cand:
            break
        _, best = heapq.heappop(cand)
        found.append(best)
    return found


def link_disjoint_set(
    topo: Topology, src: int, dst: int, max_paths: int
) -> list[tuple[int, ...]]:
    """Greedy shortest-first link-disjoint paths (up to ``max_paths``).

    Returns fewer when the graph runs out of disjoint routes; an empty list
    when ``dst`` is unreachable.
    """
    if max_paths < 1:
        raise PathError("max_paths must be >= 1")
    used: set[int] = set()
    out: list[tuple[int, ...]] = []
    while len(out) < max_paths:
        seq = shortest_path_nodes(topo, src, dst, banned_links=frozenset(used))
        if seq is None:
            break
        out.append(seq)
        used.update(_nodes_to_links(topo, seq))
    return out


def build_pathsets(
    topo: Topology, traffic: TrafficSpec, k_background: int, r_max: int
) -> PathSet:
    """Candidate paths for an instance.

    Every demand gets up to ``k_background`` shortest paths for its
    point-to-point uses (dimensioning routes chain demands s-ne -> p-ne
    like any other demand); each chain additionally gets a link-disjoint
    set of at most ``r_max + 1`` paths that its demands share during
    resource allocation.  A demand or chain without any path makes the
    instance invalid.
    """
    if r_max < 0:
        raise PathError("r_max must be >= 0")
    paths: list[Path] = []
    per_demand: dict[int, tuple[int, ...]] = {}
    per_chain: dict[int, tuple[int, ...]] = {}

    for c in traffic.chains:
        seqs = link_disjoint_set(topo, c.s_ne, c.p_ne, r_max + 1)
        if not seqs:
            raise PathError(f"empty path set for chain {c.id} ({c.s_ne}->{c.p_ne})")
        ids = []
        for seq in seqs:
            paths.append(
                Path(
                    id=len(paths),
                    owner=("chain", c.id),
                    node_seq=seq,
                    link_seq=_nodes_to_links(topo, seq),
                )
            )
            ids.append(paths[-1].id)
        per_chain[c.id] = tuple(ids)

    for d in traffic.demands:
        try:
            seqs = k_shortest(topo, d.src, d.dst, k_background)
        except PathError:
            raise PathError(
                f"empty path set for demand {d.id} ({d.src}->{d.dst})"
            ) from None
        ids = []
        for seq in seqs:
            paths.append(
                Path(
                    id=len(paths),
                    owner=("demand", d.id),
                    node_seq=seq,
                    link_seq=_nodes_to_links(topo, seq),
                )
            )
            ids.append(paths[-1].id)
        per_demand[d.id] = tuple(ids)

    return PathSet(paths=tuple(paths), per_demand=per_demand, per_chain=per_chain)
