"""Traffic model: background demands, service chains and their demands.

Background traffic is one demand per ordered node pair with a uniform
random volume.  Determinism contract: pairs are enumerated in lexicographic
(src, dst) id order and exactly one value is drawn per pair from
``numpy.random.default_rng(seed)``, so a seed pins the whole matrix.

Service-chain traffic enters at an s-ne and exits at its anchored p-ne
after traversing the chain's VNF sequence.  Demand ids are globally
unique: background demands first, chain demands appended after.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .net import ROLE_S_NE, Topology

CLASS_BACKGROUND = "background"
CLASS_CHAIN = "chain"

#: Default 4-VNF chain of the mobile-gateway use case: entry gateway and
#: exit load-balancer/firewall are fixed endpoints, the two middleboxes
#: in between may be replicated.
DEFAULT_VNF_TEMPLATE = (
    ("gateway", False),
    ("tcp_optimizer", True),
    ("cache_pep", True),
    ("firewall_nat", False),
)


class TrafficError(ValueError):
    pass


@dataclass(frozen=True)
class Demand:
    id: int
    src: int
    dst: int
    volume_gbps: float
    klass: str = CLASS_BACKGROUND
    chain_id: int | None = None

    def __post_init__(self):
        if self.volume_gbps <= 0:
            raise TrafficError(f"demand {self.id}: volume must be positive")
        if self.src == self.dst:
            raise TrafficError(f"demand {self.id}: src == dst")
        if self.klass not in (CLASS_BACKGROUND, CLASS_CHAIN):
            raise TrafficError(f"demand {self.id}: unknown class {self.klass!r}")
        if (self.klass == CLASS_CHAIN) != (self.chain_id is not None):
            raise TrafficError(f"demand {self.id}: chain_id/class mismatch")


@dataclass(frozen=True)
class VnfSpec:
    index: int
    label: str
    replicable: bool


@dataclass(frozen=True)
class ServiceChain:
    """Ordered VNF sequence anchored between one s-ne and one p-ne.

    The first and last VNF sit at fixed logical positions of the chain
    (entry/exit processing) and must not be replicable.
    """

    id: int
    s_ne: int
    p_ne: int
    vnfs: tuple[VnfSpec, ...]
    demand_ids: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.vnfs) < 2:
            raise TrafficError(f"chain {self.id}: needs at least 2 VNFs")
        if self.vnfs[0].replicable or self.vnfs[-1].replicable:
            raise TrafficError(
                f"chain {self.id}: first and last VNF must not be replicable"
            )
        for i, v in enumerate(self.vnfs):
            if v.index != i:
                raise TrafficError(f"chain {self.id}: VNF indices must be 0..n-1")
        if self.s_ne == self.p_ne:
            raise TrafficError(f"chain {self.id}: s-ne equals p-ne")


@dataclass(frozen=True)
class TrafficSpec:
    demands: tuple[Demand, ...]
    chains: tuple[ServiceChain, ...]
    seed: int | None = None
    _by_id: dict[int, Demand] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        by_id = {}
        for d in self.demands:
            if d.id in by_id:
                raise TrafficError(f"duplicate demand id {d.id}")
            by_id[d.id] = d
        for c in self.chains:
            for did in c.demand_ids:
                if did not in by_id:
                    raise TrafficError(f"chain {c.id}: unknown demand id {did}")
                if by_id[did].chain_id != c.id:
                    raise TrafficError(f"chain {c.id}: demand {did} not owned by it")
        object.__setattr__(self, "_by_id", by_id)

    def demand(self, did: int) -> Demand:
        return self._by_id[did]

    @property
    def background(self) -> tuple[Demand, ...]:
        return tuple(d for d in self.demands if d.klass == CLASS_BACKGROUND)

    def chain_demands(self, chain_id: int) -> tuple[Demand, ...]:
        chain = next(c for c in self.chains if c.id == chain_id)
        return tuple(self._by_id[i] for i in chain.demand_ids)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "seed": self.seed,
            "demands": [
                {
                    "id": d.id,
                    "src": d.src,
                    "dst": d.dst,
                    "volume_gbps": d.volume_gbps,
                    "class": d.klass,
                    "chain_id": d.chain_id,
                }
                for d in self.demands
            ],
            "chains": [
                {
                    "id": c.id,
                    "s_ne": c.s_ne,
                    "p_ne": c.p_ne,
                    "vnfs": [
                        {"index": v.index, "label": v.label, "replicable": v.replicable}
                        for v in c.vnfs
                    ],
                    "demand_ids": list(c.demand_ids),
                }
                for c in self.chains
            ],
        }
        return json.dumps(doc, sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TrafficSpec":
        doc = json.loads(text)
        demands = tuple(
            Demand(
                id=d["id"],
                src=d["src"],
                dst=d["dst"],
                volume_gbps=d["volume_gbps"],
                klass=d["class"],
                chain_id=d.get("chain_id"),
            )
            for d in doc["demands"]
        )
        chains = tuple(
            ServiceChain(
                id=c["id"],
                s_ne=c["s_ne"],
                p_ne=c["p_ne"],
                vnfs=tuple(
                    VnfSpec(v["index"], v["label"], v["replicable"]) for v in c["vnfs"]
                ),
                demand_ids=tuple(c["demand_ids"]),
            )
            for c in doc["chains"]
        )
        return cls(demands=demands, chains=chains, seed=doc.get("seed"))


def gen_background(
    topo: Topology, low_gbps: float, high_gbps: float, seed: int
) -> list[Demand]:
    """One demand per ordered node pair, volume ~ U[low, high]."""
    if low_gbps <= 0 or high_gbps <= 0:
        raise TrafficError("background volume bounds must be positive")
    if low_gbps > high_gbps:
        raise TrafficError("background volume lower bound exceeds upper bound")
    rng = np.random.default_rng(seed)
    demands = []
    for src in range(len(topo.nodes)):
        for dst in range(len(topo.nodes)):
            if src == dst:
                continue
            vol = float(rng.uniform(low_gbps, high_gbps))
            demands.append(
                Demand(id=len(demands), src=src, dst=dst, volume_gbps=vol)
            )
    return demands


def chains_from_topology(
    topo: Topology, vnf_template: tuple[tuple[str, bool], ...] = DEFAULT_VNF_TEMPLATE
) -> list[ServiceChain]:
    """One chain per annotated s-ne (in node-id order), ending at its anchor."""
    chains = []
    for n in topo.nodes:
        if n.role != ROLE_S_NE:
            continue
        if n.p_ne_anchor is None:
            raise TrafficError(f"s-ne {n.name} has no p-ne anchor")
        vnfs = tuple(
            VnfSpec(index=i, label=lbl, replicable=rep)
            for i, (lbl, rep) in enumerate(vnf_template)
        )
        chains.append(
            ServiceChain(id=len(chains), s_ne=n.id, p_ne=n.p_ne_anchor, vnfs=vnfs)
        )
    return chains


def gen_chain_demands(
    chains: list[ServiceChain],
    demands_per_chain: int,
    volume_gbps: float,
    start_id: int = 0,
) -> tuple[list[ServiceChain], list[Demand]]:
    """Equal-volume demands per chain; ids continue from ``start_id``."""
    if demands_per_chain < 1:
        raise TrafficError("demands_per_chain must be >= 1")
    if volume_gbps <= 0:
        raise TrafficError("chain demand volume must be positive")
    out_chains: list[ServiceChain] = []
    demands: list[Demand] = []
    next_id = start_id
    for c in chains:
        ids = []
        for _ in range(demands_per_chain):
            demands.append(
                Demand(
                    id=next_id,
                    src=c.s_ne,
                    dst=c.p_ne,
                    volume_gbps=volume_gbps,
                    klass=CLASS_CHAIN,
                    chain_id=c.id,
                )
            )
            ids.append(next_id)
            next_id += 1
        out_chains.append(
            ServiceChain(
                id=c.id, s_ne=c.s_ne, p_ne=c.p_ne, vnfs=c.vnfs, demand_ids=tuple(ids)
            )
        )
    return out_chains, demands


def build_traffic(
    topo: Topology,
    background: dict | None,
    chains_cfg: dict | None,
) -> TrafficSpec:
    """Assemble a TrafficSpec from config fragments.

    ``background``: {"low_gbps", "high_gbps", "seed"} or None for none.
    ``chains_cfg``: {"demands_per_chain", "volume_gbps", "vnfs": [[label,
    replicable], ...]} or None for no chain traffic.
    """
    demands: list[Demand] = []
    seed = None
    if background is not None:
        seed = int(background["seed"])
        demands.extend(
            gen_background(
                topo, float(background["low_gbps"]), float(background["high_gbps"]), seed
            )
        )
    chains: list[ServiceChain] = []
    if chains_cfg is not None:
        template = tuple(
            (str(lbl), bool(rep)) for lbl, rep in chains_cfg.get("vnfs", DEFAULT_VNF_TEMPLATE)
        )
        chains = chains_from_topology(topo, template)
        chains, chain_demands = gen_chain_demands(
            chains,
            int(chains_cfg["demands_per_chain"]),
            float(chains_cfg["volume_gbps"]),
            start_id=len(demands),
        )
        demands.extend(chain_demands)
    return TrafficSpec(demands=tuple(demands), chains=tuple(chains), seed=seed)
