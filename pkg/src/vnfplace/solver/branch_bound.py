"""Deterministic depth-first branch-and-bound over binary variables.

Node order, branching choice and every tie-break are pinned:

* depth-first stack; the child whose bound constraint matches the
  nearer integer of the branching value is explored first (0.5 goes to 1);
* branching variable = most fractional, lowest variable id on ties;
* a node is pruned when its LP bound cannot beat the incumbent by more
  than ``gap_tol`` (absolute);
* every incumbent must pass the independent constraint checker before it
  is accepted — the checker shares no code with the simplex.

Single worker only; determinism is part of the solver contract.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from ..milp import BINARY, SENSE_EQ, SENSE_LE, MilpModel
from . import check
from .simplex import SolverError, solve_lp

INT_TOL = 1e-6


@dataclass
class SolverStats:
    nodes: int = 0
    lp_iterations: int = 0
    wall_time_s: float = 0.0
    best_bound: float | None = None
    gap: float | None = None


@dataclass
class Solution:
    status: str  # optimal | infeasible | unbounded | time_limit | numerical
    objective: float | None
    values: dict[int, float]
    stats: SolverStats = field(default_factory=SolverStats)


def _presolve_bounds(model: MilpModel) -> dict[int, tuple[float, float]] | None:
    """Bound tightening from singleton rows; None means proven infeasible.

    Binary bounds are rounded to the nearest feasible integer, which is
    the only integrality reasoning done before branching.
    """
    lb = {v.id: v.lb for v in model.vars}
    ub = {v.id: v.ub for v in model.vars}
    kind = {v.id: v.kind for v in model.vars}
    singles = [c for c in model.constraints if len(c.terms) == 1]
    for _ in range(8):
        changed = False
        for c in singles:
            (vid, a) = c.terms[0]
            if a == 0.0:
                continue
            if c.sense == SENSE_EQ:
                val = c.rhs / a
                new_lb, new_ub = val, val
            elif (c.sense == SENSE_LE) == (a > 0):
                # a*x <= rhs with a>0, or a*x >= rhs with a<0
                new_lb, new_ub = lb[vid], c.rhs / a
            else:
                new_lb, new_ub = c.rhs / a, ub[vid]
            if new_lb > lb[vid] + 1e-12:
                lb[vid] = new_lb
                changed = True
            if new_ub < ub[vid] - 1e-12:
                ub[vid] = new_ub
                changed = True
            if kind[vid] == BINARY:
                if lb[vid] > INT_TOL:
                    if lb[vid] > 1 + INT_TOL:
                        return None
                    lb[vid] = 1.0
                if ub[vid] < 1 - INT_TOL:
                    if ub[vid] < -INT_TOL:
                        return None
                    ub[vid] = 0.0
            if lb[vid] > ub[vid] + 1e-9:
                return None
        if not changed:
            break
    out = {}
    for v in model.vars:
        if lb[v.id] != v.lb or ub[v.id] != v.ub:
            out[v.id] = (lb[v.id], ub[v.id])
    return out


def solve_milp(
    model: MilpModel,
    time_limit_s: float | None = None,
    gap_tol: float = 1e-6,
    workers: int = 1,
    log=None,
) -> Solution:
    """Exact solve of a binary MILP; see module docstring for the rules."""
    if workers != 1:
        raise SolverError("embedded solver is single-worker (deterministic)")
    model.validate()
    t0 = time.perf_counter()
    stats = SolverStats()

    root_patch = _presolve_bounds(model)
    if root_patch is None:
        stats.wall_time_s = time.perf_counter() - t0
        return Solution("infeasible", None, {}, stats)

    binaries = [v.id for v in model.vars if v.kind == BINARY]
    incumbent: dict[int, float] | None = None
    incumbent_obj = math.inf
    # stack entries: (bounds_patch, parent_bound); parent_bound is a valid
    # lower bound on every descendant's objective
    stack: list[tuple[dict[int, tuple[float, float]], float]] = [
        (root_patch, -math.inf)
    ]
    aborted = None  # "time_limit" | "numerical"

    while stack:
        if time_limit_s is not None and time.perf_counter() - t0 > time_limit_s:
            aborted = "time_limit"
            break
        patch, parent_bound = stack.pop()
        if parent_bound >= incumbent_obj - gap_tol:
            continue
        lp = solve_lp(model, bounds=patch)
        stats.nodes += 1
        stats.lp_iterations += lp.iterations
        if lp.status == "infeasible":
            continue
        if lp.status == "unbounded":
            stats.wall_time_s = time.perf_counter() - t0
            return Solution("unbounded", None, {}, stats)
        if lp.status != "optimal":
            aborted = "numerical"
            break
        if lp.objective >= incumbent_obj - gap_tol:
            continue

        frac_var, frac_amt = -1, 0.0
        for vid in binaries:
            f = abs(lp.values[vid] - round(lp.values[vid]))
            if f > frac_amt + 1e-12:
                frac_amt, frac_var = f, vid
        if frac_var < 0 or frac_amt <= INT_TOL:
            cand = dict(lp.values)
            for vid in binaries:
                cand[vid] = float(round(cand[vid]))
            violations = check.evaluate(model, cand, tol=1e-6)
            if not violations:
                obj = model.objective_value(cand)
                if obj < incumbent_obj - 1e-12:
                    incumbent, incumbent_obj = cand, obj
                    # weak-duality monitor: the global best bound may never
                    # exceed an accepted incumbent's objective
                    open_bounds = [pb for _, pb in stack]
                    glb = min(open_bounds) if open_bounds else obj
                    if glb > incumbent_obj + 1e-6:
                        raise SolverError(
                            f"bound {glb} above incumbent {incumbent_obj}"
                        )
                continue
            # rounding broke a tight row: branch on the largest residual
            # fractionality instead (still a valid partition); with every
            # binary at an exact integer this is real numerical trouble
            if frac_var < 0 or frac_amt <= 1e-12:
                aborted = "numerical"
                if log:
                    log(f"checker rejected integral node: {violations[:3]}")
                break

        x = lp.values[frac_var]
        near = 1.0 if x >= 0.5 else 0.0
        far = 1.0 - near
        child_far = dict(patch)
        child_far[frac_var] = (far, far)
        child_near = dict(patch)
        child_near[frac_var] = (near, near)
        stack.append((child_far, lp.objective))
        stack.append((child_near, lp.objective))  # popped first

    stats.wall_time_s = time.perf_counter() - t0
    open_bounds = [pb for _, pb in stack]
    best_bound = min(open_bounds) if open_bounds else (
        incumbent_obj if incumbent is not None else None
    )
    stats.best_bound = None if best_bound in (None, -math.inf) else float(best_bound)

    if aborted == "numerical":
        return Solution("numerical", None, {}, stats)
    if aborted == "time_limit":
        if incumbent is not None:
            stats.gap = max(0.0, incumbent_obj - (best_bound if best_bound is not None and math.isfinite(best_bound) else -math.inf))
            if not math.isfinite(stats.gap):
                stats.gap = None
            return Solution("time_limit", incumbent_obj, incumbent, stats)
        return Solution("time_limit", None, {}, stats)
    if incumbent is None:
        return Solution("infeasible", None, {}, stats)
    stats.gap = 0.0
    stats.best_bound = incumbent_obj
    return Solution("optimal", incumbent_obj, incumbent, stats)
