"""Generic MILP container: variables, linear constraints, an objective.

This is the neutral interchange object between the model builders, the
embedded solver, the LP-file writer and the external-backend protocol.
Variable kinds are restricted to binary and continuous — the formulations
never need general integers.

Variable and constraint names double as LP-file identifiers, so they are
validated against the LP-safe alphabet on creation.  ``symbols`` keeps a
registry from name-family prefixes to the mathematical notation used in
the model documentation (e.g. ``"Rb" -> "R_p^lambda ..."``) so solutions
can be read back without parsing names.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

BINARY = "binary"
CONTINUOUS = "continuous"

SENSE_LE = "<="
SENSE_EQ = "="
SENSE_GE = ">="

_LP_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class Var:
    id: int
    name: str
    kind: str
    lb: float
    ub: float


@dataclass(frozen=True)
class LinConstraint:
    id: int
    name: str
    terms: tuple[tuple[int, float], ...]  # (var id, coefficient), var ids unique
    sense: str
    rhs: float


@dataclass
class Objective:
    terms: tuple[tuple[int, float], ...]
    constant: float = 0.0


class MilpModel:
    """Minimization model built incrementally by the formulations."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.vars: list[Var] = []
        self.constraints: list[LinConstraint] = []
        self.objective: Objective | None = None
        self.symbols: dict[str, str] = {}
        self._var_by_name: dict[str, int] = {}
        self._con_names: set[str] = set()

    # -- construction ------------------------------------------------------

    def add_var(
        self, name: str, kind: str = CONTINUOUS, lb: float = 0.0, ub: float = math.inf
    ) -> int:
        if not _LP_NAME.match(name):
            raise ModelError(f"variable name {name!r} is not LP-safe")
        if name in self._var_by_name:
            raise ModelError(f"duplicate variable name {name!r}")
        if kind not in (BINARY, CONTINUOUS):
            raise ModelError(f"unknown variable kind {kind!r}")
        if kind == BINARY:
            lb, ub = 0.0, 1.0
        if not (lb <= ub):
            raise ModelError(f"variable {name!r}: lb > ub")
        if math.isnan(lb) or math.isnan(ub) or math.isinf(lb):
            raise ModelError(f"variable {name!r}: bad bounds")
        vid = len(self.vars)
        self.vars.append(Var(id=vid, name=name, kind=kind, lb=lb, ub=ub))
        self._var_by_name[name] = vid
        return vid

    def _check_terms(
        self, where: str, terms: list[tuple[int, float]]
    ) -> tuple[tuple[int, float], ...]:
        merged: dict[int, float] = {}
        for vid, coef in terms:
            if not isinstance(vid, int) or vid < 0 or vid >= len(self.vars):
                raise ModelError(f"{where}: unknown variable id {vid}")
            if math.isnan(coef) or math.isinf(coef):
                raise ModelError(f"{where}: non-finite coefficient for var {vid}")
            merged[vid] = merged.get(vid, 0.0) + float(coef)
        return tuple(sorted(merged.items()))

    def add_constraint(
        self, name: str, terms: list[tuple[int, float]], sense: str, rhs: float
    ) -> int:
        if not _LP_NAME.match(name):
            raise ModelError(f"constraint name {name!r} is not LP-safe")
        if name in self._con_names:
            raise ModelError(f"duplicate constraint name {name!r}")
        if sense not in (SENSE_LE, SENSE_EQ, SENSE_GE):
            raise ModelError(f"bad sense {sense!r}")
        if math.isnan(rhs) or math.isinf(rhs):
            raise ModelError(f"constraint {name!r}: non-finite rhs")
        cid = len(self.constraints)
        self.constraints.append(
            LinConstraint(
                id=cid,
                name=name,
                terms=self._check_terms(f"constraint {name!r}", terms),
                sense=sense,
                rhs=float(rhs),
            )
        )
        self._con_names.add(name)
        return cid

    def set_objective(self, terms: list[tuple[int, float]], constant: float = 0.0):
        self.objective = Objective(
            terms=self._check_terms("objective", terms), constant=float(constant)
        )

    def register_symbol(self, prefix: str, notation: str):
        self.symbols[prefix] = notation

    # -- queries -----------------------------------------------------------

    @property
    def num_vars(self) -> int:
        return len(self.vars)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    @property
    def num_binaries(self) -> int:
        return sum(1 for v in self.vars if v.kind == BINARY)

    def var_by_name(self, name: str) -> Var:
        try:
            return self.vars[self._var_by_name[name]]
        except KeyError:
            raise ModelError(f"unknown variable {name!r}") from None

    def validate(self):
        """Full consistency pass; raises ModelError on the first defect."""
        if self.objective is None:
            raise ModelError("objective unset")
        for t in self.objective.terms:
            if t[0] >= len(self.vars):
                raise ModelError("objective references unknown variable")
        for c in self.constraints:
            if not c.terms:
                # constant row: keep only if trivially feasible
                ok = (
                    (c.sense == SENSE_LE and 0 <= c.rhs)
                    or (c.sense == SENSE_GE and 0 >= c.rhs)
                    or (c.sense == SENSE_EQ and c.rhs == 0)
                )
                if not ok:
                    raise ModelError(f"constraint {c.name!r} is constant-infeasible")

    def objective_value(self, values: dict[int, float]) -> float:
        assert self.objective is not None
        return self.objective.constant + sum(
            coef * values.get(vid, 0.0) for vid, coef in self.objective.terms
        )
