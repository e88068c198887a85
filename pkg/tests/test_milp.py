"""MILP container: construction rules, validation, objective evaluation."""

import math

import pytest

from vnfplace.milp import (
    BINARY,
    CONTINUOUS,
    SENSE_EQ,
    SENSE_GE,
    SENSE_LE,
    MilpModel,
    ModelError,
)


def test_add_var_basics():
    m = MilpModel("m")
    x = m.add_var("x", CONTINUOUS, 0.0, 5.0)
    y = m.add_var("y", BINARY)
    assert (x, y) == (0, 1)
    assert m.vars[x].ub == 5.0
    # binary bounds are forced regardless of arguments
    z = m.add_var("z", BINARY, lb=-3.0, ub=7.0)
    assert (m.vars[z].lb, m.vars[z].ub) == (0.0, 1.0)
    assert m.num_vars == 3 and m.num_binaries == 2
    assert m.var_by_name("y").id == 1
    with pytest.raises(ModelError):
        m.var_by_name("nope")


def test_add_var_errors():
    m = MilpModel()
    with pytest.raises(ModelError, match="not LP-safe"):
        m.add_var("bad name")
    with pytest.raises(ModelError, match="not LP-safe"):
        m.add_var("1x")
    m.add_var("x")
    with pytest.raises(ModelError, match="duplicate"):
        m.add_var("x")
    with pytest.raises(ModelError, match="kind"):
        m.add_var("k", "integer")
    with pytest.raises(ModelError, match="lb > ub"):
        m.add_var("w", CONTINUOUS, 2.0, 1.0)
    with pytest.raises(ModelError):  # nan fails the ordering check
        m.add_var("n", CONTINUOUS, float("nan"), 1.0)
    with pytest.raises(ModelError):
        m.add_var("n2", CONTINUOUS, 0.0, float("nan"))
    with pytest.raises(ModelError, match="bad bounds"):
        m.add_var("i", CONTINUOUS, -math.inf, 1.0)


def test_terms_merge_and_sort():
    m = MilpModel()
    a = m.add_var("a")
    b = m.add_var("b")
    cid = m.add_constraint("r", [(b, 1.0), (a, 2.0), (b, 0.5)], SENSE_LE, 4.0)
    con = m.constraints[cid]
    assert con.terms == ((a, 2.0), (b, 1.5))
    assert con.sense == SENSE_LE and con.rhs == 4.0


def test_add_constraint_errors():
    m = MilpModel()
    x = m.add_var("x")
    m.add_constraint("r", [(x, 1.0)], SENSE_GE, 0.0)
    with pytest.raises(ModelError, match="duplicate"):
        m.add_constraint("r", [(x, 1.0)], SENSE_LE, 1.0)
    with pytest.raises(ModelError, match="not LP-safe"):
        m.add_constraint("bad:name", [(x, 1.0)], SENSE_LE, 1.0)
    with pytest.raises(ModelError, match="sense"):
        m.add_constraint("s", [(x, 1.0)], "==", 1.0)
    with pytest.raises(ModelError, match="unknown variable id"):
        m.add_constraint("t", [(5, 1.0)], SENSE_LE, 1.0)
    with pytest.raises(ModelError, match="non-finite"):
        m.add_constraint("u", [(x, math.inf)], SENSE_LE, 1.0)
    with pytest.raises(ModelError, match="non-finite"):
        m.add_constraint("v", [(x, 1.0)], SENSE_LE, math.nan)


def test_validate_and_objective():
    m = MilpModel()
    x = m.add_var("x")
    y = m.add_var("y", BINARY)
    with pytest.raises(ModelError, match="objective unset"):
        m.validate()
    m.set_objective([(x, 2.0), (y, -1.0)], constant=3.0)
    m.validate()
    assert m.objective_value({x: 1.5, y: 1.0}) == pytest.approx(5.0)
    assert m.objective_value({}) == pytest.approx(3.0)  # missing values read as 0


def test_constant_row_feasibility():
    m = MilpModel()
    m.add_var("x")
    m.set_objective([])
    m.add_constraint("ok_le", [], SENSE_LE, 0.5)
    m.add_constraint("ok_ge", [], SENSE_GE, -1.0)
    m.add_constraint("ok_eq", [], SENSE_EQ, 0.0)
    m.validate()
    m.add_constraint("bad", [], SENSE_LE, -0.5)
    with pytest.raises(ModelError, match="constant-infeasible"):
        m.validate()


def test_symbols_registry():
    m = MilpModel()
    m.register_symbol("Rb", "background routing choice")
    assert m.symbols["Rb"] == "background routing choice"
