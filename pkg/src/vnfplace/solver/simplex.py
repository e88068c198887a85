"""Two-phase dense tableau simplex with bounded variables.

Phase 1 minimizes artificial variables to find a basic feasible solution;
phase 2 optimizes the real objective.  Rows are scaled by their largest
absolute coefficient before solving.  Variable upper bounds are handled
inside the ratio test (bound flips) rather than as extra rows, which is
what lets branch-and-bound fix binaries by bounds alone.

Entering rule: Dantzig (most negative reduced cost, lowest index on
ties), switching permanently to Bland's rule after a run of degenerate
pivots — deterministic anti-cycling.  Leaving rule: minimum ratio,
smallest basic variable id within a 1e-12 tie window.

The pivot loop itself lives in a kernel module selected at import time:
a compiled Cython extension when available, else the numpy twin.  Both
implement identical pivot choices and identical floating-point update
order, so results do not depend on which kernel is active.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from ..milp import SENSE_EQ, SENSE_GE, SENSE_LE, MilpModel
from ._tableau_py import BASIC, NB_LB, NB_UB
from ._tableau_py import simplex_kernel as _kernel_py

_FORCE_PURE = os.environ.get("VNFPLACE_PURE_PYTHON", "") not in ("", "0")
if not _FORCE_PURE:
    try:
        from ._tableau_cy import simplex_kernel as _kernel_cy
    except ImportError:
        _kernel_cy = None
else:
    _kernel_cy = None

_kernel = _kernel_cy if _kernel_cy is not None else _kernel_py


def kernel_name() -> str:
    """Which pivot kernel is active: "compiled" or "pure"."""
    return "compiled" if _kernel is _kernel_cy and _kernel_cy is not None else "pure"


FEAS_TOL = 1e-9  # on scaled constraints
_PHASE1_TOL = 1e-7
_STALL_LIMIT = 60


class SolverError(RuntimeError):
    pass


@dataclass
class LpSolution:
    status: str  # optimal | infeasible | unbounded | numerical
    objective: float | None
    values: dict[int, float]
    iterations: int


def solve_lp(
    model: MilpModel,
    bounds: dict[int, tuple[float, float]] | None = None,
    tol: float = FEAS_TOL,
    max_iter: int | None = None,
) -> LpSolution:
    """Solve the LP relaxation (binaries treated as [lb, ub] continuous).

    ``bounds`` overrides per-variable bounds (how branch-and-bound fixes
    binaries).  Returns an optimal *basic* solution.
    """
    model.validate()
    n = model.num_vars
    lb = np.array([v.lb for v in model.vars], dtype=np.float64)
    ub = np.array([v.ub for v in model.vars], dtype=np.float64)
    if bounds:
        for vid, (lo, hi) in bounds.items():
            lb[vid], ub[vid] = lo, hi
    if np.any(lb > ub):
        return LpSolution("infeasible", None, {}, 0)

    # -- rows: senses to <=/= , shift by lb, scale ------------------------
    rows: list[tuple[list[tuple[int, float]], str, float]] = []
    for c in model.constraints:
        terms = list(c.terms)
        sense, rhs = c.sense, c.rhs
        if sense == SENSE_GE:
            terms = [(v, -a) for v, a in terms]
            rhs, sense = -rhs, SENSE_LE
        rhs -= sum(a * lb[v] for v, a in terms)
        if not terms:
            feas = rhs >= -tol if sense == SENSE_LE else abs(rhs) <= tol
            if not feas:
                return LpSolution("infeasible", None, {}, 0)
            continue
        scale = max(abs(a) for _, a in terms)
        if scale == 0.0:
            feas = rhs >= -tol if sense == SENSE_LE else abs(rhs) <= tol
            if not feas:
                return LpSolution("infeasible", None, {}, 0)
            continue
        rows.append(([(v, a / scale) for v, a in terms], sense, rhs / scale))

    m = len(rows)
    n_slack = sum(1 for _, s, _ in rows if s == SENSE_LE)
    art_rows = []
    # negate rows with negative rhs so initial basic values are >= 0
    ncols_guess = n + n_slack
    slack_col = {}
    col = n
    for i, (_, s, _) in enumerate(rows):
        if s == SENSE_LE:
            slack_col[i] = col
            col += 1
    for i, (terms, s, rhs) in enumerate(rows):
        needs_art = s == SENSE_EQ or rhs < 0
        if needs_art:
            art_rows.append(i)
    n_art = len(art_rows)
    ncols = ncols_guess + n_art

    T = np.zeros((m + 1, ncols), dtype=np.float64)
    values = np.zeros(m, dtype=np.float64)
    basis = np.zeros(m, dtype=np.int64)
    vstat = np.zeros(ncols, dtype=np.int8)
    ranges = np.empty(ncols, dtype=np.float64)
    ranges[:n] = ub - lb
    ranges[n:] = np.inf

    art_col = {}
    next_art = ncols_guess
    for i in art_rows:
        art_col[i] = next_art
        next_art += 1

    for i, (terms, s, rhs) in enumerate(rows):
        neg = rhs < 0
        sgn = -1.0 if neg else 1.0
        for v, a in terms:
            T[i, v] = sgn * a
        if s == SENSE_LE:
            T[i, slack_col[i]] = sgn
        values[i] = sgn * rhs
        if i in art_col:
            T[i, art_col[i]] = 1.0
            basis[i] = art_col[i]
        else:
            basis[i] = slack_col[i]
        vstat[basis[i]] = BASIC

    n_enterable = ncols_guess
    if max_iter is None:
        max_iter = 20000 + 20 * (m + ncols)

    iters_total = 0
    bland = False
    if n_art:
        # phase-1 reduced costs: c = e_art, minus the artificial rows
        T[m, :] = 0.0
        for i in art_rows:
            T[m, art_col[i]] = 1.0
        for i in art_rows:
            T[m, :] -= T[i, :]
        code, it, bland = _kernel(
            T, values, basis, vstat, ranges, n_enterable, tol, _STALL_LIMIT,
            max_iter, False,
        )
        iters_total += int(it)
        if code == 2:
            return LpSolution("numerical", None, {}, iters_total)
        z1 = float(sum(values[i] for i in range(m) if basis[i] >= ncols_guess))
        if z1 > _PHASE1_TOL:
            return LpSolution("infeasible", None, {}, iters_total)
        _drive_out_artificials(T, values, basis, vstat, ranges, ncols_guess, tol)

    # -- phase 2 ----------------------------------------------------------
    c_ext = np.zeros(ncols, dtype=np.float64)
    for vid, coef in model.objective.terms:
        c_ext[vid] += coef
    T[m, :] = c_ext
    for r in range(m):
        cb = c_ext[basis[r]]
        if cb != 0.0:
            T[m, :] -= cb * T[r, :]
    code, it, bland = _kernel(
        T, values, basis, vstat, ranges, n_enterable, tol, _STALL_LIMIT,
        max_iter, bland,
    )
    iters_total += int(it)
    if code == 2:
        return LpSolution("numerical", None, {}, iters_total)
    if code == 1:
        return LpSolution("unbounded", None, {}, iters_total)

    # -- extraction -------------------------------------------------------
    y = np.zeros(n, dtype=np.float64)
    for j in range(n):
        if vstat[j] == NB_UB:
            y[j] = ranges[j]
    for r in range(m):
        if basis[r] < n:
            y[basis[r]] = values[r]
    # tiny FP cleanup only (never moves a value more than the tolerance)
    np.clip(y, 0.0, None, out=y)
    fin = np.isfinite(ranges[:n])
    y[fin] = np.minimum(y[fin], ranges[:n][fin])
    x = lb + y
    vals = {j: float(x[j]) for j in range(n)}
    obj = model.objective.constant + sum(
        coef * vals[vid] for vid, coef in model.objective.terms
    )
    return LpSolution("optimal", float(obj), vals, iters_total)


def _drive_out_artificials(T, values, basis, vstat, ranges, n_enterable, tol):
    """Pivot basic zero-valued artificials out where possible.

    Rows where every real column coefficient is ~0 are redundant; their
    artificial stays basic at zero and can never change value because the
    kernel only enters real columns (all zero in that row).
    """
    m = T.shape[0] - 1
    for r in range(m):
        if basis[r] < n_enterable:
            continue
        pivot_j = -1
        for j in range(n_enterable):
            if vstat[j] != BASIC and ranges[j] > tol and abs(T[r, j]) > 1e-7:
                pivot_j = j
                break
        if pivot_j < 0:
            continue
        piv = T[r, pivot_j]
        k = basis[r]
        T[r, :] /= piv
        f = T[:, pivot_j].copy()
        f[r] = 0.0
        T -= np.outer(f, T[r, :])
        # zero-step swap: nothing moves, so the entering column keeps its
        # current value — 0 from the lower bound, its range from the upper
        entered_from_ub = vstat[pivot_j] == NB_UB
        vstat[k] = NB_LB
        basis[r] = pivot_j
        vstat[pivot_j] = BASIC
        values[r] = ranges[pivot_j] if entered_from_ub else 0.0
