"""Shared fixtures: repository data directories and tiny builder helpers."""

from pathlib import Path

import pytest

from vnfplace.net import Topology, annotate_gateways
from vnfplace.paths import Path as CandidatePath
from vnfplace.paths import PathSet

REPO = Path(__file__).resolve().parents[1]
DATA = REPO / "data"
CORPUS = DATA / "corpus"
CONFIGS = DATA / "configs"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def configs_dir() -> Path:
    return CONFIGS


def topo_from_edges(n: int, edges, caps=None, name: str = "t") -> Topology:
    """Topology with nodes n0..n{n-1} and the given undirected (a, b) pairs.

    ``caps`` is None (undimensioned), a scalar applied to every link, or a
    dict keyed by the (a, b) pair.
    """
    lines = [f"node n{i}" for i in range(n)]
    for e in edges:
        a, b = e
        if caps is None:
            lines.append(f"link n{a} n{b}")
        elif isinstance(caps, dict):
            lines.append(f"link n{a} n{b} {caps[(a, b)]}")
        else:
            lines.append(f"link n{a} n{b} {caps}")
    return Topology.parse("\n".join(lines) + "\n", name=name)


@pytest.fixture(scope="session")
def us12_gw() -> Topology:
    """us12 topology annotated with the reduced-instance gateways."""
    topo = Topology.parse((DATA / "us12.topo").read_text(), name="us12")
    return annotate_gateways(topo, [0, 2, 8], {0: 5, 2: 5, 8: 10})


def links_by_ends(topo) -> dict[tuple[int, int], int]:
    return {(l.src, l.dst): l.id for l in topo.links}


def make_path(pid, owner, node_seq, topo) -> CandidatePath:
    ends = links_by_ends(topo)
    link_seq = tuple(ends[(a, b)] for a, b in zip(node_seq, node_seq[1:]))
    return CandidatePath(
        id=pid, owner=owner, node_seq=tuple(node_seq), link_seq=link_seq
    )


def pathset_for(topo, demand_routes=None, chain_routes=None) -> PathSet:
    """PathSet from explicit node sequences per demand / chain id."""
    paths = []
    per_demand = {}
    per_chain = {}
    for did, seqs in (demand_routes or {}).items():
        ids = []
        for seq in seqs:
            p = make_path(len(paths), ("demand", did), seq, topo)
            paths.append(p)
            ids.append(p.id)
        per_demand[did] = tuple(ids)
    for cid, seqs in (chain_routes or {}).items():
        ids = []
        for seq in seqs:
            p = make_path(len(paths), ("chain", cid), seq, topo)
            paths.append(p)
            ids.append(p.id)
        per_chain[cid] = tuple(ids)
    return PathSet(paths=tuple(paths), per_demand=per_demand, per_chain=per_chain)
