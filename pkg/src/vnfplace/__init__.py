"""Network capacity, routing, and replicated service-chain placement.

The package plans a network in three optimization stages that share one
topology and traffic description:

1. **Dimensioning** — pick one capacity type per link so every demand
   fits with an overprovisioning margin, at minimum installed capacity.
2. **Traffic engineering** — route background demands over candidate
   paths minimizing a convex piecewise-linear congestion cost.
3. **Resource allocation** — route service-chain demands and place each
   chain's VNF sequence on the nodes of the chosen paths, optionally
   replicating the inner VNFs across link-disjoint paths, minimizing
   congestion cost, data-center count, or both under per-node and
   global budgets.

All three are binary/mixed-integer linear programs solved either by the
bundled branch-and-bound solver (embedded) or by any external solver
speaking the LP-file protocol (``solver/external.py``).
"""

from .costfn import CostFunction, default_cost_function
from .net import Topology, annotate_gateways, parse_sndlib
from .paths import PathSet, build_pathsets
from .scenarios import ScenarioConfig, load_config, run_pipeline, sweep_replicas
from .traffic import TrafficSpec, build_traffic

__version__ = "0.1.0"

__all__ = [
    "CostFunction",
    "default_cost_function",
    "Topology",
    "annotate_gateways",
    "parse_sndlib",
    "PathSet",
    "build_pathsets",
    "ScenarioConfig",
    "load_config",
    "run_pipeline",
    "sweep_replicas",
    "TrafficSpec",
    "build_traffic",
    "__version__",
]
