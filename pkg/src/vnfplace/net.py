"""Network model: nodes, directed links, capacity granularities, topologies.

Topologies are read from a small line-oriented text format::

    # comment
    node Seattle
    node Portland
    link Seattle Portland [capacity_gbps]

Every ``link`` line declares one bidirectional adjacency and produces two
directed links (A->B, then B->A) in declaration order.  A converter for
SNDlib files (native and XML flavors) is provided so published topologies
such as janos-us can be ingested directly.

Topology objects are immutable after construction; derived topologies
(gateway annotation, capacity assignment) are new objects.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace

ROLE_PLAIN = "plain"
ROLE_S_NE = "s-ne"
ROLE_P_NE = "p-ne"

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class Node:
    id: int
    name: str
    role: str = ROLE_PLAIN
    dc_allowed: bool = True
    # For an s-ne node: id of the p-ne terminating its service chain.
    p_ne_anchor: int | None = None


@dataclass(frozen=True)
class Link:
    """One directed link.  ``capacity_gbps`` is None until dimensioned."""

    id: int
    src: int
    dst: int
    capacity_gbps: float | None = None

    @property
    def ends(self) -> tuple[int, int]:
        return (self.src, self.dst)


@dataclass(frozen=True)
class CapacityTypeSet:
    """Discrete capacity granularities a link may be assigned (Gbps)."""

    bandwidths_gbps: tuple[float, ...] = (2.5, 10.0, 40.0, 100.0, 200.0)

    def __post_init__(self):
        bw = self.bandwidths_gbps
        if not bw:
            raise TopologyError("capacity type set must not be empty")
        if any(b <= 0 for b in bw):
            raise TopologyError("capacity types must be positive")
        if any(a >= b for a, b in zip(bw, bw[1:])):
            raise TopologyError("capacity types must be strictly increasing")

    def smallest_feasible(self, load: float, theta: float) -> float | None:
        """Smallest type t with ``load <= theta * t``; None if even the
        largest type is insufficient."""
        for t in self.bandwidths_gbps:
            if load <= theta * t + 1e-9:
                return t
        return None


@dataclass(frozen=True)
class Topology:
    nodes: tuple[Node, ...]
    links: tuple[Link, ...]
    name: str = "topology"
    _out: dict[int, tuple[int, ...]] = field(default_factory=dict, repr=False, compare=False)
    _by_name: dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        out: dict[int, list[int]] = {n.id: [] for n in self.nodes}
        by_name: dict[str, int] = {}
        for n in self.nodes:
            if n.name in by_name:
                raise TopologyError(f"duplicate node name {n.name!r}")
            by_name[n.name] = n.id
        for l in self.links:
            if l.src == l.dst:
                raise TopologyError(f"self-loop on node {self.nodes[l.src].name!r}")
            if l.src not in out or l.dst not in out:
                raise TopologyError(f"link {l.id} references unknown node id")
            if l.capacity_gbps is not None and l.capacity_gbps <= 0:
                raise TopologyError(f"link {l.id}: capacity must be positive")
            out[l.src].append(l.id)
        object.__setattr__(self, "_out", {k: tuple(v) for k, v in out.items()})
        object.__setattr__(self, "_by_name", by_name)

    # -- lookups ---------------------------------------------------------

    def node_by_name(self, name: str) -> Node:
        try:
            return self.nodes[self._by_name[name]]
        except KeyError:
            raise TopologyError(f"unknown node {name!r}") from None

    def out_links(self, node_id: int) -> tuple[int, ...]:
        return self._out[node_id]

    def neighbors(self, node_id: int) -> list[int]:
        return [self.links[lid].dst for lid in self._out[node_id]]

    @property
    def s_ne_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if n.role == ROLE_S_NE)

    @property
    def p_ne_ids(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if n.role == ROLE_P_NE)

    def is_connected(self) -> bool:
        if not self.nodes:
            return True
        seen = {self.nodes[0].id}
        stack = [self.nodes[0].id]
        undirected: dict[int, set[int]] = {n.id: set() for n in self.nodes}
        for l in self.links:
            undirected[l.src].add(l.dst)
            undirected[l.dst].add(l.src)
        while stack:
            for m in undirected[stack.pop()]:
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return len(seen) == len(self.nodes)

    # -- construction ----------------------------------------------------

    @classmethod
    def parse(cls, text: str, name: str = "topology") -> "Topology":
        """Parse the native text format (see module docstring)."""
        nodes: list[Node] = []
        by_name: dict[str, int] = {}
        links: list[Link] = []
        pairs: set[tuple[int, int]] = set()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            kw = parts[0]
            if kw == "node":
                if len(parts) != 2:
                    raise TopologyError(f"line {lineno}: expected 'node <name>'")
                nm = parts[1]
                if not _NAME_RE.match(nm):
                    raise TopologyError(f"line {lineno}: bad node name {nm!r}")
                if nm in by_name:
                    raise TopologyError(f"line {lineno}: duplicate node {nm!r}")
                by_name[nm] = len(nodes)
                nodes.append(Node(id=len(nodes), name=nm))
            elif kw == "link":
                if len(parts) not in (3, 4):
                    raise TopologyError(
                        f"line {lineno}: expected 'link <a> <b> [capacity_gbps]'"
                    )
                a, b = parts[1], parts[2]
                for nm in (a, b):
                    if nm not in by_name:
                        raise TopologyError(
                            f"line {lineno}: link references undeclared node {nm!r}"
                        )
                cap = None
                if len(parts) == 4:
                    try:
                        cap = float(parts[3])
                    except ValueError:
                        raise TopologyError(
                            f"line {lineno}: bad capacity {parts[3]!r}"
                        ) from None
                    if cap <= 0:
                        raise TopologyError(f"line {lineno}: capacity must be positive")
                ia, ib = by_name[a], by_name[b]
                if ia == ib:
                    raise TopologyError(f"line {lineno}: self-loop on {a!r}")
                key = (min(ia, ib), max(ia, ib))
                if key in pairs:
                    raise TopologyError(f"line {lineno}: duplicate link {a!r} {b!r}")
                pairs.add(key)
                links.append(Link(id=len(links), src=ia, dst=ib, capacity_gbps=cap))
                links.append(Link(id=len(links), src=ib, dst=ia, capacity_gbps=cap))
            else:
                raise TopologyError(f"line {lineno}: unknown keyword {kw!r}")
        topo = cls(nodes=tuple(nodes), links=tuple(links), name=name)
        if not topo.is_connected():
            raise TopologyError("topology is not connected")
        return topo

    def to_text(self) -> str:
        """Canonical serialization; ``parse(to_text())`` round-trips."""
        out = [f"# topology: {self.name}", f"# nodes: {len(self.nodes)}"]
        for n in self.nodes:
            out.append(f"node {n.name}")
        for l in self.links:
            if l.id % 2 == 1:
                continue  # each undirected pair is written once
            a, b = self.nodes[l.src].name, self.nodes[l.dst].name
            if l.capacity_gbps is not None:
                out.append(f"link {a} {b} {l.capacity_gbps:.17g}")
            else:
                out.append(f"link {a} {b}")
        return "\n".join(out) + "\n"

    def with_capacities(self, caps: dict[int, float]) -> "Topology":
        """Return a topology with per-link-id capacities assigned."""
        new_links = []
        for l in self.links:
            if l.id in caps:
                new_links.append(replace(l, capacity_gbps=float(caps[l.id])))
            else:
                new_links.append(l)
        return replace(self, links=tuple(new_links))


def annotate_gateways(
    topo: Topology,
    s_ne_ids: list[int],
    p_ne_assignment: dict[int, int],
) -> Topology:
    """Mark s-ne and p-ne roles; each s-ne anchors one service chain ending
    at its assigned p-ne.

    ``p_ne_assignment`` maps s-ne id -> p-ne id and must cover every s-ne.
    """
    ids = {n.id for n in topo.nodes}
    p_ne_ids = sorted(set(p_ne_assignment.values()))
    for i in list(s_ne_ids) + p_ne_ids:
        if i not in ids:
            raise TopologyError(f"gateway id {i} not in topology")
    if len(set(s_ne_ids)) != len(s_ne_ids):
        raise TopologyError("duplicate s-ne id")
    overlap = set(s_ne_ids) & set(p_ne_ids)
    if overlap:
        raise TopologyError(f"node {sorted(overlap)[0]} assigned both s-ne and p-ne")
    missing = [i for i in s_ne_ids if i not in p_ne_assignment]
    if missing:
        raise TopologyError(f"s-ne {missing[0]} has no p-ne assignment")
    new_nodes = []
    for n in topo.nodes:
        if n.id in set(s_ne_ids):
            new_nodes.append(
                replace(n, role=ROLE_S_NE, p_ne_anchor=p_ne_assignment[n.id])
            )
        elif n.id in set(p_ne_ids):
            new_nodes.append(replace(n, role=ROLE_P_NE))
        else:
            new_nodes.append(n)
    return replace(topo, nodes=tuple(new_nodes))


# -- SNDlib ingestion -----------------------------------------------------


def parse_sndlib(text: str, name: str = "sndlib") -> Topology:
    """Convert an SNDlib file (native or XML flavor) to a Topology.

    Only node names and link endpoints are taken; SNDlib module/capacity
    structures are ignored because dimensioning assigns capacities here.
    """
    if text.lstrip().startswith("<"):
        return _parse_sndlib_xml(text, name)
    return _parse_sndlib_native(text, name)


def _parse_sndlib_native(text: str, name: str) -> Topology:
    section = None
    node_names: list[str] = []
    edges: list[tuple[str, str]] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.match(r"^([A-Z]+)\s*\($", line) or re.match(r"^([A-Z]+)\s*\(", line)
        if m and m.group(1) in ("NODES", "LINKS", "DEMANDS", "ADMISSIBLE"):
            section = m.group(1)
            continue
        if line == ")":
            section = None
            continue
        if section == "NODES":
            nm = line.split()[0]
            node_names.append(nm)
        elif section == "LINKS":
            # <id> ( <src> <dst> ) <attrs...>
            m = re.match(r"^\S+\s*\(\s*(\S+)\s+(\S+)\s*\)", line)
            if not m:
                raise TopologyError(f"unparseable SNDlib link line: {line!r}")
            edges.append((m.group(1), m.group(2)))
    if not node_names:
        raise TopologyError("SNDlib file has no NODES section")
    return _assemble(node_names, edges, name)


def _parse_sndlib_xml(text: str, name: str) -> Topology:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as e:
        raise TopologyError(f"bad SNDlib XML: {e}") from None

    def local(tag):
        return tag.rsplit("}", 1)[-1]

    node_names: list[str] = []
    edges: list[tuple[str, str]] = []
    for el in root.iter():
        if local(el.tag) == "node":
            node_names.append(el.attrib["id"])
        elif local(el.tag) == "link":
            src = dst = None
            for ch in el:
                if local(ch.tag) == "source":
                    src = ch.text.strip()
                elif local(ch.tag) == "target":
                    dst = ch.text.strip()
            if src is None or dst is None:
                raise TopologyError("SNDlib XML link without source/target")
            edges.append((src, dst))
    if not node_names:
        raise TopologyError("SNDlib XML has no nodes")
    return _assemble(node_names, edges, name)


def _assemble(node_names: list[str], edges: list[tuple[str, str]], name: str) -> Topology:
    sanitized = []
    for nm in node_names:
        s = re.sub(r"[^A-Za-z0-9_.\-]", "_", nm)
        if not _NAME_RE.match(s):
            s = "n_" + s
        sanitized.append(s)
    by_name = {nm: i for i, nm in enumerate(node_names)}
    nodes = tuple(Node(id=i, name=s) for i, s in enumerate(sanitized))
    links = []
    seen = set()
    for a, b in edges:
        if a not in by_name or b not in by_name:
            raise TopologyError(f"SNDlib link references unknown node {a!r}/{b!r}")
        ia, ib = by_name[a], by_name[b]
        key = (min(ia, ib), max(ia, ib))
        if key in seen:
            continue  # SNDlib directed duplicates collapse to one pair
        seen.add(key)
        links.append(Link(id=len(links), src=ia, dst=ib))
        links.append(Link(id=len(links), src=ib, dst=ia))
    topo = Topology(nodes=nodes, links=tuple(links), name=name)
    if not topo.is_connected():
        raise TopologyError("SNDlib topology is not connected")
    return topo
