"""File-protocol backend for external MILP solvers.

Protocol: the model is written as an LP file, the configured command is
invoked with the LP path and a solution path substituted for ``{lp}`` and
``{sol}`` (appended as two positional arguments when the placeholders are
absent), and the solution file is read back::

    status optimal
    objective 42.5
    x0 1
    x1 0

Lines are ``<variable name> <value>``; unknown names are an error,
missing names default to 0.  The returned solution is verified by the
independent constraint checker before being accepted (tolerance 1e-5 —
foreign solvers have their own feasibility/integrality tolerances).

The default command comes from the ``VNFPLACE_SOLVER`` environment
variable; the package ships a reference command
``python -m vnfplace.highs_backend`` built on scipy's HiGHS.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import sys
import tempfile
import time
from pathlib import Path

from .. import lpio
from ..milp import BINARY, MilpModel
from . import check
from .branch_bound import Solution, SolverStats
from .simplex import SolverError

EXTERNAL_CHECK_TOL = 1e-5


def default_command() -> str:
    cmd = os.environ.get("VNFPLACE_SOLVER", "").strip()
    if cmd:
        return cmd
    return f"{shlex.quote(sys.executable)} -m vnfplace.highs_backend {{lp}} {{sol}}"


def solve_external(
    model: MilpModel,
    command: str | None = None,
    time_limit_s: float | None = None,
) -> Solution:
    model.validate()
    command = command or default_command()
    t0 = time.perf_counter()
    with tempfile.TemporaryDirectory(prefix="vnfplace-ext-") as td:
        lp_path = Path(td) / "model.lp"
        sol_path = Path(td) / "model.sol"
        lp_path.write_text(lpio.write_lp(model))
        argv = _build_argv(command, lp_path, sol_path, time_limit_s)
        try:
            proc = subprocess.run(
                argv,
                capture_output=True,
                text=True,
                timeout=None if time_limit_s is None else time_limit_s + 60,
            )
        except subprocess.TimeoutExpired:
            raise SolverError(f"external solver timed out: {' '.join(argv)}")
        if proc.returncode != 0:
            raise SolverError(
                f"external solver failed (rc={proc.returncode}): "
                f"{proc.stderr.strip()[:500]}"
            )
        if not sol_path.exists():
            raise SolverError("external solver wrote no solution file")
        status, objective, by_name = parse_solution_file(sol_path.read_text())
    stats = SolverStats(wall_time_s=time.perf_counter() - t0)
    if status in ("infeasible", "unbounded"):
        return Solution(status, None, {}, stats)
    if status not in ("optimal", "time_limit"):
        raise SolverError(f"external solver reported status {status!r}")

    values: dict[int, float] = {}
    for name, val in by_name.items():
        try:
            v = model.var_by_name(name)
        except Exception:
            raise SolverError(f"solution file names unknown variable {name!r}")
        values[v.id] = val
    for v in model.vars:
        values.setdefault(v.id, 0.0)
        if v.kind == BINARY:
            values[v.id] = float(round(values[v.id]))
    violations = check.evaluate(model, values, tol=EXTERNAL_CHECK_TOL)
    if violations:
        raise SolverError(
            f"external solution fails verification: {violations[:3]}"
        )
    obj = model.objective_value(values)
    if objective is not None and abs(obj - objective) > 1e-4 * max(1.0, abs(obj)):
        raise SolverError(
            f"external objective {objective} disagrees with recomputed {obj}"
        )
    return Solution(status, obj, values, stats)


def _build_argv(command, lp_path, sol_path, time_limit_s):
    parts = shlex.split(command)
    if any("{lp}" in p for p in parts) or any("{sol}" in p for p in parts):
        argv = [
            p.replace("{lp}", str(lp_path)).replace("{sol}", str(sol_path))
            for p in parts
        ]
    else:
        argv = parts + [str(lp_path), str(sol_path)]
    if time_limit_s is not None:
        argv.append(f"--time-limit={time_limit_s}")
    return argv


def parse_solution_file(text: str) -> tuple[str, float | None, dict[str, float]]:
    status = None
    objective = None
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "status" and len(parts) == 2:
            status = parts[1]
        elif parts[0] == "objective" and len(parts) == 2:
            objective = float(parts[1])
        elif len(parts) == 2:
            values[parts[0]] = float(parts[1])
        else:
            raise SolverError(f"solution file line {lineno} unparseable: {raw!r}")
    if status is None:
        raise SolverError("solution file has no status line")
    return status, objective, values
