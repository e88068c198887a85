"""LP-file subset writer and reader.

The dialect is the common CPLEX-style LP text format restricted to what
the models need: ``Minimize``, ``Subject To``, ``Bounds``, ``Binaries``,
``End``.  Only minimization is supported and only binary/continuous
variables exist.  The writer is deterministic (model order, %.17g
numbers); the reader accepts the writer's output plus the usual cosmetic
variants (case, ``ST``/``S.T.``, ``<`` for ``<=``, ``Binary`` section
spelling, ``free`` bounds).
"""

from __future__ import annotations

import math
import re

from .milp import BINARY, CONTINUOUS, SENSE_EQ, SENSE_GE, SENSE_LE, MilpModel, ModelError


class LpFormatError(ValueError):
    pass


def _num(x: float) -> str:
    return f"{x:.17g}"


def write_lp(model: MilpModel) -> str:
    """Serialize a model; raises ModelError if the objective is unset."""
    model.validate()
    out = [f"\\ {model.name}", "Minimize"]
    terms = " ".join(
        f"{'+' if c >= 0 else '-'} {_num(abs(c))} {model.vars[v].name}"
        for v, c in model.objective.terms
    )
    const = model.objective.constant
    if const or not terms:
        terms = (terms + f" {'+' if const >= 0 else '-'} {_num(abs(const))}").strip()
    out.append(f" obj: {terms}")
    out.append("Subject To")
    for con in model.constraints:
        if not con.terms:
            continue  # vacuous constant row, not expressible in LP format
        body = " ".join(
            f"{'+' if c >= 0 else '-'} {_num(abs(c))} {model.vars[v].name}"
            for v, c in con.terms
        )
        out.append(f" {con.name}: {body} {con.sense} {_num(con.rhs)}")
    bounds = []
    for v in model.vars:
        if v.kind == BINARY:
            continue
        if v.lb == 0.0 and math.isinf(v.ub):
            continue  # LP default
        if math.isinf(v.ub):
            bounds.append(f" {v.name} >= {_num(v.lb)}")
        elif v.lb == v.ub:
            bounds.append(f" {v.name} = {_num(v.lb)}")
        else:
            bounds.append(f" {_num(v.lb)} <= {v.name} <= {_num(v.ub)}")
    if bounds:
        out.append("Bounds")
        out.extend(bounds)
    binaries = [v.name for v in model.vars if v.kind == BINARY]
    if binaries:
        out.append("Binaries")
        for i in range(0, len(binaries), 12):
            out.append(" " + " ".join(binaries[i : i + 12]))
    out.append("End")
    return "\n".join(out) + "\n"


_TOKEN = re.compile(
    r"\s*(?:(?P<cmp><=|>=|=<|=>|<|>|=)|(?P<num>[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<sign>[+-])|(?P<colon>:))"
)

_SECTIONS = {
    "minimize": "objective",
    "min": "objective",
    "maximize": "maximize",
    "max": "maximize",
    "subject": "constraints",
    "st": "constraints",
    "s.t.": "constraints",
    "bounds": "bounds",
    "bound": "bounds",
    "binaries": "binaries",
    "binary": "binaries",
    "bin": "binaries",
    "general": "general",
    "generals": "general",
    "gen": "general",
    "end": "end",
}


def _tokenize(line: str):
    pos = 0
    toks = []
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m or m.end() == pos:
            if line[pos:].strip():
                raise LpFormatError(f"unparseable LP text near {line[pos:pos+20]!r}")
            break
        pos = m.end()
        for kind in ("cmp", "num", "name", "sign", "colon"):
            if m.group(kind) is not None:
                toks.append((kind, m.group(kind)))
                break
    return toks


def _section_of(line: str) -> str | None:
    words = line.strip().lower().split()
    if not words:
        return None
    head = words[0].rstrip(":")
    if head in ("subject", "such") and len(words) >= 2 and words[1].startswith("to"):
        return "constraints"
    if head in _SECTIONS and head not in ("subject", "such"):
        return _SECTIONS[head]
    return None


def read_lp(text: str) -> MilpModel:
    """Parse LP text into a MilpModel (minimization, binary/continuous)."""
    model = MilpModel(name="lp")
    pending_bounds: list[tuple[str, float | None, float | None]] = []
    pending_bins: list[str] = []

    def var_id(name: str) -> int:
        try:
            return model.var_by_name(name).id
        except ModelError:
            return model.add_var(name, CONTINUOUS, 0.0, math.inf)

    section = None
    # join continuation lines: a statement ends where the next one's label
    # or section keyword begins; simplest robust approach is token streaming
    # per section over logical lines.
    logical: list[tuple[str, str]] = []  # (section, line)
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].rstrip()
        if not line.strip():
            continue
        sec = _section_of(line)
        if sec is not None:
            if sec == "maximize":
                raise LpFormatError("only minimization is supported")
            if sec == "general":
                raise LpFormatError("general integers are not supported")
            section = sec
            # tolerate "Subject To" on its own line only
            continue
        if section is None:
            raise LpFormatError(f"statement before any section: {line.strip()!r}")
        logical.append((section, line))

    def parse_expr(toks, where):
        """tokens -> (terms list, constant) up to a comparison token."""
        terms: list[tuple[int, float]] = []
        const = 0.0
        sign = 1.0
        coef: float | None = None
        i = 0
        while i < len(toks):
            kind, val = toks[i]
            if kind == "cmp":
                break
            if kind == "sign":
                if coef is not None:
                    const += sign * coef
                    coef = None
                sign = 1.0 if val == "+" else -1.0
            elif kind == "num":
                if coef is not None:
                    const += sign * coef
                v = float(val)
                if val[0] in "+-":
                    sign, v = (1.0 if val[0] == "+" else -1.0), abs(v)
                coef = v
            elif kind == "name":
                c = sign * (coef if coef is not None else 1.0)
                terms.append((var_id(val), c))
                sign, coef = 1.0, None
            else:
                raise LpFormatError(f"{where}: unexpected token {val!r}")
            i += 1
        if coef is not None:
            const += sign * coef
        return terms, const, toks[i:]

    obj_terms: list[tuple[int, float]] = []
    obj_const = 0.0
    obj_seen = False
    ncon = 0
    for sec, line in logical:
        toks = _tokenize(line)
        if not toks:
            continue
        if sec == "objective":
            if len(toks) >= 2 and toks[0][0] == "name" and toks[1][0] == "colon":
                toks = toks[2:]
            terms, const, rest = parse_expr(toks, "objective")
            if rest:
                raise LpFormatError("comparison inside objective")
            obj_terms.extend(terms)
            obj_const += const
            obj_seen = True
        elif sec == "constraints":
            name = f"c{ncon}"
            if len(toks) >= 2 and toks[0][0] == "name" and toks[1][0] == "colon":
                name = toks[0][1]
                toks = toks[2:]
            terms, const, rest = parse_expr(toks, f"constraint {name}")
            if not rest or rest[0][0] != "cmp":
                raise LpFormatError(f"constraint {name}: missing comparison")
            cmp_tok = rest[0][1]
            sense = {
                "<=": SENSE_LE, "<": SENSE_LE, "=<": SENSE_LE,
                ">=": SENSE_GE, ">": SENSE_GE, "=>": SENSE_GE,
                "=": SENSE_EQ,
            }[cmp_tok]
            rhs_terms, rhs_const, tail = parse_expr(rest[1:], f"constraint {name} rhs")
            if tail or rhs_terms:
                raise LpFormatError(f"constraint {name}: rhs must be a number")
            model.add_constraint(name, terms, sense, rhs_const - const)
            ncon += 1
        elif sec == "bounds":
            pending_bounds.append(_parse_bound(toks, line))
        elif sec == "binaries":
            for kind, val in toks:
                if kind != "name":
                    raise LpFormatError(f"bad token {val!r} in Binaries")
                pending_bins.append(val)
        elif sec == "end":
            break
    if not obj_seen:
        raise LpFormatError("LP file has no objective")
    model.set_objective(obj_terms, obj_const)

    for name, lb, ub in pending_bounds:
        vid = var_id(name)
        v = model.vars[vid]
        new_lb = v.lb if lb is None else lb
        new_ub = v.ub if ub is None else ub
        if new_lb > new_ub:
            raise LpFormatError(f"bounds cross for {name}")
        model.vars[vid] = type(v)(id=v.id, name=v.name, kind=v.kind, lb=new_lb, ub=new_ub)
    for name in pending_bins:
        vid = var_id(name)
        v = model.vars[vid]
        model.vars[vid] = type(v)(id=v.id, name=v.name, kind=BINARY, lb=0.0, ub=1.0)
    return model


def _parse_bound(toks, line):
    """Bounds statement -> (var, lb or None, ub or None)."""
    names = [v for k, v in toks if k == "name"]
    if names and names[-1].lower() == "free" and len(names) >= 2:
        return (names[0], -math.inf, math.inf)
    kinds = [k for k, _ in toks]
    vals = [v for _, v in toks]
    # num cmp name cmp num
    if kinds == ["num", "cmp", "name", "cmp", "num"]:
        lo, hi = float(vals[0]), float(vals[4])
        if vals[1] not in ("<=", "<", "=<") or vals[3] not in ("<=", "<", "=<"):
            raise LpFormatError(f"bad bounds line: {line.strip()!r}")
        return (vals[2], lo, hi)
    if kinds == ["name", "cmp", "num"]:
        v = float(vals[2])
        if vals[1] in ("<=", "<", "=<"):
            return (vals[0], None, v)
        if vals[1] in (">=", ">", "=>"):
            return (vals[0], v, None)
        return (vals[0], v, v)  # "x = v"
    if kinds == ["num", "cmp", "name"]:
        v = float(vals[0])
        if vals[1] in ("<=", "<", "=<"):
            return (vals[2], v, None)
        if vals[1] in (">=", ">", "=>"):
            return (vals[2], None, v)
    if kinds == ["sign", "num", "cmp", "name", "cmp", "num"]:
        lo = float(vals[1]) * (-1 if vals[0] == "-" else 1)
        return (vals[3], lo, float(vals[5]))
    raise LpFormatError(f"bad bounds line: {line.strip()!r}")
