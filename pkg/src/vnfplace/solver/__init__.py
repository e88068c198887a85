"""Embedded MILP solver (two-phase simplex + branch-and-bound) and the
external-solver file protocol."""

from .branch_bound import Solution, SolverStats, solve_milp
from .external import default_command, solve_external
from .simplex import LpSolution, SolverError, kernel_name, solve_lp

__all__ = [
    "Solution",
    "SolverStats",
    "LpSolution",
    "SolverError",
    "solve_milp",
    "solve_lp",
    "solve_external",
    "default_command",
    "kernel_name",
]


def solve(model, solver_cfg: dict | None = None) -> Solution:
    """Dispatch on backend config: {"backend": "embedded"|"external", ...}."""
    cfg = solver_cfg or {}
    backend = cfg.get("backend", "embedded")
    time_limit = cfg.get("time_limit_s")
    if backend == "embedded":
        return solve_milp(
            model,
            time_limit_s=time_limit,
            gap_tol=cfg.get("gap_tol", 1e-6),
            workers=cfg.get("workers", 1),
        )
    if backend == "external":
        return solve_external(
            model, command=cfg.get("command"), time_limit_s=time_limit
        )
    raise SolverError(f"unknown solver backend {backend!r}")
