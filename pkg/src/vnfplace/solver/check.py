"""Independent constraint checker for candidate solutions.

Deliberately shares no code with the simplex/branch-and-bound machinery
(plain dict/loop arithmetic, no numpy): every incumbent the solver wants
to accept, and every solution an external backend returns, must pass this
before it is surfaced.
"""

from __future__ import annotations

from ..milp import BINARY, SENSE_EQ, SENSE_GE, SENSE_LE, MilpModel


def evaluate(
    model: MilpModel, values: dict[int, float], tol: float = 1e-6
) -> list[str]:
    """Return human-readable violations of bounds, integrality, constraints."""
    out: list[str] = []
    for v in model.vars:
        x = values.get(v.id, 0.0)
        if x < v.lb - tol:
            out.append(f"var {v.name}: {x} below lb {v.lb}")
        if x > v.ub + tol:
            out.append(f"var {v.name}: {x} above ub {v.ub}")
        if v.kind == BINARY and abs(x - round(x)) > tol:
            out.append(f"var {v.name}: {x} not integral")
    for c in model.constraints:
        lhs = 0.0
        for vid, coef in c.terms:
            lhs += coef * values.get(vid, 0.0)
        if c.sense == SENSE_LE and lhs > c.rhs + tol:
            out.append(f"constraint {c.name}: {lhs} > {c.rhs}")
        elif c.sense == SENSE_GE and lhs < c.rhs - tol:
            out.append(f"constraint {c.name}: {lhs} < {c.rhs}")
        elif c.sense == SENSE_EQ and abs(lhs - c.rhs) > tol:
            out.append(f"constraint {c.name}: {lhs} != {c.rhs}")
    return out


def satisfied(model: MilpModel, values: dict[int, float], tol: float = 1e-6) -> bool:
    return not evaluate(model, values, tol)
