"""SMT-LIB2 printing, response parsing and an external-solver bridge."""
from __future__ import annotations

import re
import shlex
import subprocess
from fractions import Fraction
from pathlib import Path

from .formula import And, Atom, Const, Formula, Not, Or, free_vars
from .simplex import ResourceLimit


class SmtLibError(Exception):
    pass


def _name(v: str) -> str:
    if "|" in v or "\\" in v:
        raise SmtLibError(f"variable name {v!r} cannot be quoted")
    return f"|{v}|"


def _num(q: Fraction) -> str:
    q = Fraction(q)
    mag = abs(q)
    s = str(mag.numerator) if mag.denominator == 1 else f"(/ {mag.numerator} {mag.denominator})"
    return f"(- {s})" if q < 0 else s


def _term(lhs) -> str:
    parts = []
    for v, c in lhs.terms:
        parts.append(_name(v) if c == 1 else f"(* {_num(c)} {_name(v)})")
    if lhs.constant or not parts:
        parts.append(_num(lhs.constant))
    return parts[0] if len(parts) == 1 else "(+ " + " ".join(parts) + ")"


def to_smtlib(f: Formula) -> str:
    """SMT-LIB2 term for a formula."""
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return f"({f.rel} {_term(f.lhs)} 0)"
    if isinstance(f, Not):
        return f"(not {to_smtlib(f.arg)})"
    if isinstance(f, (And, Or)):
        op = "and" if isinstance(f, And) else "or"
        return f"({op} " + " ".join(to_smtlib(a) for a in f.args) + ")"
    raise TypeError(f"not a formula: {f!r}")


def script(f: Formula, get_model: bool = True) -> str:
    lines = ["(set-logic LRA)"]
    for v in sorted(free_vars(f)):
        lines.append(f"(declare-const {_name(v)} Real)")
    lines.append(f"(assert {to_smtlib(f)})")
    lines.append("(check-sat)")
    if get_model:
        lines.append("(get-model)")
    return "\n".join(lines) + "\n"


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r'\s*(?:(;[^\n]*)|(\()|(\))|(\|[^|]*\|)|("(?:[^"]|"")*")|([^\s()|";]+))')


def parse_sexprs(text: str) -> list:
    """All top-level S-expressions; atoms are strings, quoted symbols unquoted."""
    stack: list = [[]]
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise SmtLibError(f"unexpected character at offset {pos}")
        pos = m.end()
        comment, op, cl, quoted, string, sym = m.groups()
        if comment:
            continue
        if op:
            stack.append([])
        elif cl:
            if len(stack) == 1:
                raise SmtLibError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        elif quoted:
            stack[-1].append(quoted[1:-1])
        elif string:
            stack[-1].append(string)
        elif sym:
            stack[-1].append(sym)
    if len(stack) != 1:
        raise SmtLibError("unbalanced '('")
    return stack[0]


def _value(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x)
    if x and x[0] == "-" and len(x) == 2:
        return -_value(x[1])
    if x and x[0] == "/" and len(x) == 3:
        return _value(x[1]) / _value(x[2])
    raise SmtLibError(f"cannot read value {x!r}")


def parse_response(text: str):
    """``(status, model)`` from a solver's check-sat/get-model output."""
    items = parse_sexprs(text)
    if not items or not isinstance(items[0], str):
        raise SmtLibError("solver output does not start with a status")
    status = items[0]
    if status not in ("sat", "unsat", "unknown"):
        raise SmtLibError(f"unexpected solver status {status!r}")
    model = {}
    if status == "sat":
        for block in items[1:]:
            if not isinstance(block, list):
                continue
            if block and block[0] == "error":
                raise SmtLibError(f"solver error: {block[1:]}")
            defs = block[1:] if block and block[0] == "model" else block
            for d in defs:
                if isinstance(d, list) and len(d) == 5 and d[0] == "define-fun":
                    model[d[1]] = _value(d[4])
    return status, model


class SubprocessSolver:
    """Pipes a script to an external SMT-LIB2 solver command (e.g. ``z3 -in``)."""

    def __init__(self, command: str, timeout: float | None = 60):
        self.argv = shlex.split(command)
        if not self.argv:
            raise SmtLibError("empty solver command")
        self.timeout = timeout

    def check(self, f: Formula):
        from .solver import SatResult
        try:
            proc = subprocess.run(self.argv, input=script(f), capture_output=True, text=True,
                                  timeout=self.timeout)
        except subprocess.TimeoutExpired:
            raise ResourceLimit("external solver timed out") from None
        except OSError as exc:
            raise SmtLibError(f"cannot run solver {self.argv[0]!r}: {exc}") from None
        status, model = parse_response(proc.stdout)
        if status == "unknown":
            raise ResourceLimit("external solver answered unknown")
        return SatResult(status == "sat", model if status == "sat" else None)


def dump(formulas: dict, directory) -> list:
    """Write one ``<name>.smt2`` satisfiability script per formula."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, f in formulas.items():
        p = out / f"{name}.smt2"
        p.write_text(script(f), encoding="utf-8")
        paths.append(p)
    return paths


__all__ = ["SmtLibError", "SubprocessSolver", "dump", "parse_response", "parse_sexprs",
           "script", "to_smtlib"]
