"""Fixed-column MPS interchange format for LinearProgram objects.

Field layout (1-based columns, names at most 8 characters):

    field 1: cols  2-3   (indicator: row type, bound type)
    field 2: cols  5-12  (name)
    field 3: cols 15-22  (name)
    field 4: cols 25-36  (value)
    field 5: cols 40-47  (name)
    field 6: cols 50-61  (value)

Sections are emitted in the order NAME, ROWS, COLUMNS, RHS, BOUNDS, ENDATA.
The objective is the single N row, named OBJ.  Variable lower bounds are
always written explicitly when nonzero, so UP entries never imply a free
lower bound on re-import.
"""

from __future__ import annotations

import math

from coplant.lp import EQ, GE, LE, LinearProgram, LpValidationError

MAX_NAME = 8
_ROW_TYPE = {LE: "L", GE: "G", EQ: "E"}
_TYPE_ROW = {"L": LE, "G": GE, "E": EQ}


class MpsFormatError(ValueError):
    """Text does not conform to the fixed-column MPS layout."""


def _format_value(value: float) -> str:
    for digits in (11, 10, 9, 8, 7, 6, 5):
        s = f"{value:.{digits}G}"
        if len(s) <= 12:
            return s
    return f"{value:.4E}"  # pragma: no cover - last resort


def _entry(f1: str, f2: str, f3: str = "", f4: str = "", f5: str = "", f6: str = "") -> str:
    line = f" {f1:<2} {f2:<8}  {f3:<8}  {f4:<12}"
    if f5:
        line = f"{line}   {f5:<8}  {f6:<12}"
    return line.rstrip()


def export_lp(problem: LinearProgram, name: str = "COPLANT", rename: bool = False) -> str:
    """Serialize a validated problem to fixed-column MPS text.

    With rename=False, variable/constraint names longer than the 8-character
    field raise an error listing every offender.  With rename=True, compact
    generated names (C0000001 / R0000001) are substituted instead, which is
    the escape hatch for exporting large dispatch problems.
    """
    problem.validate()

    if rename:
        var_names = [f"C{j:07d}" for j in range(problem.n_variables)]
        row_names = [f"R{i:07d}" for i in range(problem.n_constraints)]
    else:
        var_names = [v.name for v in problem.variables]
        row_names = [c.name for c in problem.constraints]
        offenders = [n for n in var_names + row_names if len(n) > MAX_NAME]
        if offenders:
            raise MpsFormatError(
                "names exceed the %d-character MPS field: %s"
                % (MAX_NAME, ", ".join(sorted(set(offenders)))))
        if len(set(var_names)) != len(var_names) or len(set(row_names)) != len(row_names):
            raise MpsFormatError("duplicate names; use rename=True")

    out = [f"NAME          {name}", "ROWS", _entry("N", "OBJ")]
    for rn, con in zip(row_names, problem.constraints):
        out.append(_entry(_ROW_TYPE[con.sense], rn))

    # column-major coefficient map
    by_col: list[list[tuple[str, float]]] = [[] for _ in range(problem.n_variables)]
    for rn, con in zip(row_names, problem.constraints):
        for j, a in con.coeffs:
            by_col[j].append((rn, a))

    out.append("COLUMNS")
    for j, v in enumerate(problem.variables):
        entries = []
        if v.objective != 0.0:
            entries.append(("OBJ", v.objective))
        entries.extend(by_col[j])
        if not entries:
            entries.append(("OBJ", 0.0))  # keep every variable visible to the parser
        for rn, a in entries:
            out.append(_entry("", var_names[j], rn, _format_value(a)))

    out.append("RHS")
    for rn, con in zip(row_names, problem.constraints):
        if con.rhs != 0.0:
            out.append(_entry("", "RHS", rn, _format_value(con.rhs)))

    out.append("BOUNDS")
    for j, v in enumerate(problem.variables):
        if v.lower == v.upper:
            out.append(_entry("FX", "BND", var_names[j], _format_value(v.lower)))
            continue
        if math.isinf(v.lower) and math.isinf(v.upper):
            out.append(_entry("FR", "BND", var_names[j]))
            continue
        if math.isinf(v.lower):
            out.append(_entry("MI", "BND", var_names[j]))
        elif v.lower != 0.0:
            out.append(_entry("LO", "BND", var_names[j], _format_value(v.lower)))
        if not math.isinf(v.upper):
            out.append(_entry("UP", "BND", var_names[j], _format_value(v.upper)))

    out.append("ENDATA")
    return "\n".join(out) + "\n"


def import_lp(text: str) -> LinearProgram:
    """Parse fixed-column MPS text back into a LinearProgram."""
    lp = LinearProgram()
    section = None
    obj_row: str | None = None
    row_sense: dict[str, str] = {}
    row_index: dict[str, int] = {}
    var_index: dict[str, int] = {}
    row_coeffs: dict[str, list[tuple[int, float]]] = {}
    obj_coeffs: dict[int, float] = {}
    rhs: dict[str, float] = {}
    bounds: dict[int, list[float]] = {}

    def _var(name: str) -> int:
        if name not in var_index:
            var_index[name] = len(var_index)
        return var_index[name]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("*"):
            continue
        if not raw[0].isspace():
            word = raw.split()[0]
            if word not in ("NAME", "ROWS", "COLUMNS", "RHS", "RANGES", "BOUNDS", "ENDATA"):
                raise MpsFormatError(f"line {lineno}: unknown section {word!r}")
            section = word
            if word == "ENDATA":
                break
            continue
        fields = raw.split()
        if section == "ROWS":
            if len(fields) != 2:
                raise MpsFormatError(f"line {lineno}: malformed ROWS entry")
            rtype, rname = fields
            if rtype == "N":
                if obj_row is None:
                    obj_row = rname
                continue
            if rtype not in _TYPE_ROW:
                raise MpsFormatError(f"line {lineno}: unknown row type {rtype!r}")
            row_sense[rname] = _TYPE_ROW[rtype]
            row_index[rname] = len(row_index)
            row_coeffs[rname] = []
        elif section == "COLUMNS":
            if len(fields) not in (3, 5):
                raise MpsFormatError(f"line {lineno}: malformed COLUMNS entry")
            j = _var(fields[0])
            for rname, sval in zip(fields[1::2], fields[2::2]):
                value = float(sval)
                if rname == obj_row:
                    obj_coeffs[j] = obj_coeffs.get(j, 0.0) + value
                elif rname in row_coeffs:
                    row_coeffs[rname].append((j, value))
                else:
                    raise MpsFormatError(f"line {lineno}: unknown row {rname!r}")
        elif section == "RHS":
            if len(fields) not in (3, 5):
                raise MpsFormatError(f"line {lineno}: malformed RHS entry")
            for rname, sval in zip(fields[1::2], fields[2::2]):
                if rname == obj_row:
                    continue
                if rname not in row_sense:
                    raise MpsFormatError(f"line {lineno}: unknown row {rname!r}")
                rhs[rname] = float(sval)
        elif section == "BOUNDS":
            btype = fields[0]
            if btype in ("FR", "MI", "PL"):
                if len(fields) != 3:
                    raise MpsFormatError(f"line {lineno}: malformed BOUNDS entry")
                j = _var(fields[2])
                b = bounds.setdefault(j, [0.0, math.inf])
                if btype == "FR":
                    b[0], b[1] = -math.inf, math.inf
                elif btype == "MI":
                    b[0] = -math.inf
            elif btype in ("UP", "LO", "FX"):
                if len(fields) != 4:
                    raise MpsFormatError(f"line {lineno}: malformed BOUNDS entry")
                j = _var(fields[2])
                value = float(fields[3])
                b = bounds.setdefault(j, [0.0, math.inf])
                if btype == "UP":
                    b[1] = value
                elif btype == "LO":
                    b[0] = value
                else:
                    b[0] = b[1] = value
            else:
                raise MpsFormatError(f"line {lineno}: unknown bound type {btype!r}")
        elif section in ("NAME", "RANGES"):
            continue
        else:
            raise MpsFormatError(f"line {lineno}: data outside any section")

    if not var_index:
        raise MpsFormatError("no variables found")

    names = sorted(var_index, key=var_index.get)
    for name in names:
        j = var_index[name]
        lo, up = bounds.get(j, (0.0, math.inf))
        lp.add_variable(name, lower=lo, upper=up, objective=obj_coeffs.get(j, 0.0))
    for rname in sorted(row_index, key=row_index.get):
        lp.add_constraint(rname, row_coeffs[rname], row_sense[rname], rhs.get(rname, 0.0))
    lp.validate()
    return lp
