"""Reference external solver command: HiGHS via scipy.

Speaks the external-backend file protocol::

    python -m vnfplace.highs_backend <model.lp> <out.sol> [--time-limit=S]

Reads the LP-file subset written by :mod:`vnfplace.lpio`, solves with
``scipy.optimize.milp`` (single-threaded HiGHS, mip_rel_gap pinned to
1e-9) and writes the solution file the protocol expects.  This gives the
toolkit a real MILP engine for full-size instances without linking one.
"""

from __future__ import annotations

import sys

import numpy as np
from scipy import optimize, sparse

from . import lpio
from .milp import BINARY, SENSE_EQ, SENSE_GE, MilpModel


def _to_scipy(model: MilpModel):
    n = model.num_vars
    c = np.zeros(n)
    for vid, coef in model.objective.terms:
        c[vid] += coef
    rows_i, cols_j, data = [], [], []
    lo, hi = [], []
    r = 0
    for con in model.constraints:
        if not con.terms:
            continue
        for vid, coef in con.terms:
            rows_i.append(r)
            cols_j.append(vid)
            data.append(coef)
        if con.sense == SENSE_EQ:
            lo.append(con.rhs)
            hi.append(con.rhs)
        elif con.sense == SENSE_GE:
            lo.append(con.rhs)
            hi.append(np.inf)
        else:
            lo.append(-np.inf)
            hi.append(con.rhs)
        r += 1
    A = sparse.csc_matrix((data, (rows_i, cols_j)), shape=(r, n))
    lb = np.array([v.lb for v in model.vars])
    ub = np.array([v.ub for v in model.vars])
    integrality = np.array(
        [1 if v.kind == BINARY else 0 for v in model.vars], dtype=np.uint8
    )
    return c, A, np.array(lo), np.array(hi), lb, ub, integrality


def solve_lp_file(lp_text: str, time_limit_s: float | None = None):
    model = lpio.read_lp(lp_text)
    c, A, lo, hi, lb, ub, integrality = _to_scipy(model)
    # presolve stays off: the HiGHS presolve bundled with some scipy releases
    # returns suboptimal points flagged optimal on mixed-binary instances
    # (observed with scipy 1.15: a knapsack-style model solved to -4.5 with
    # presolve on, -5.5 off).  Exactness beats the speedup here.
    options = {"mip_rel_gap": 1e-9, "presolve": False}
    if time_limit_s is not None:
        options["time_limit"] = float(time_limit_s)
    constraints = (
        optimize.LinearConstraint(A, lo, hi) if A.shape[0] else ()
    )
    res = optimize.milp(
        c=c,
        constraints=constraints,
        integrality=integrality,
        bounds=optimize.Bounds(lb, ub),
        options=options,
    )
    # scipy status codes: 0 optimal, 1 iteration/time limit, 2 infeasible,
    # 3 unbounded
    if res.status == 0:
        status = "optimal"
    elif res.status == 1 and res.x is not None:
        status = "time_limit"
    elif res.status == 2:
        status = "infeasible"
    elif res.status == 3:
        status = "unbounded"
    else:
        status = "error"
    lines = [f"status {status}"]
    if res.x is not None:
        obj = float(res.fun) + model.objective.constant
        lines.append(f"objective {obj:.17g}")
        for v in model.vars:
            x = float(res.x[v.id])
            if v.kind == BINARY:
                x = float(round(x))
            lines.append(f"{v.name} {x:.17g}")
    return "\n".join(lines) + "\n", status


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    time_limit = None
    rest = []
    for a in argv:
        if a.startswith("--time-limit="):
            time_limit = float(a.split("=", 1)[1])
        else:
            rest.append(a)
    if len(rest) != 2:
        print(
            "usage: python -m vnfplace.highs_backend <model.lp> <out.sol> "
            "[--time-limit=S]",
            file=sys.stderr,
        )
        return 2
    lp_path, sol_path = rest
    with open(lp_path) as fh:
        text, status = solve_lp_file(fh.read(), time_limit)
    with open(sol_path, "w") as fh:
        fh.write(text)
    return 0 if status != "error" else 1


if __name__ == "__main__":
    sys.exit(main())
