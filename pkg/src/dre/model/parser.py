"""Line-oriented text formats (and their JSON mirrors) for problems and plans.

The grammar is documented in ``docs/formats.md``.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction

from .expr import Condition, LinearExpression, format_fraction, to_fraction
from .problem import (
    DEFAULT_EPSILON,
    END,
    PLAN_START,
    START,
    DurativeAction,
    Effect,
    Fluent,
    Goal,
    IncompletePlan,
    InvalidProblem,
    ParametrizedProblem,
    ParametrizedSTNPlan,
    Parameter,
    ParseError,
    StnConstraint,
    TimedAction,
    TimePoint,
    TimeTriggeredPlan,
    UndeclaredSymbol,
    make_bound,
)

# --------------------------------------------------------------------------
# expression tokenizer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+)?(?:/\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op><=|>=|:=|[-+*/()<>=]))"
)


def _tokenize(text: str, line: int | None, col0: int = 0):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos + 1)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), col0 + start + 1))
        pos = m.end()
    return out


class _ExprParser:
    def __init__(self, tokens, line):
        self.toks = tokens
        self.i = 0
        self.line = line

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def error(self, msg):
        _, _, col = self.peek()
        if col is None and self.toks:
            col = self.toks[-1][2] + len(str(self.toks[-1][1]))
        raise ParseError(msg, self.line, col)

    def expr(self) -> LinearExpression:
        acc = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> LinearExpression:
        acc = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            try:
                if op == "*":
                    acc = acc * rhs
                else:
                    if not rhs.is_constant() or rhs.constant == 0:
                        self.error("division by a non-constant or zero")
                    acc = acc / rhs.constant
            except ValueError as exc:
                self.error(str(exc))
        return acc

    def unary(self) -> LinearExpression:
        kind, val, _ = self.peek()
        if val == "-":
            self.take()
            return -self.unary()
        if val == "+":
            self.take()
            return self.unary()
        if val == "(":
            self.take()
            e = self.expr()
            if self.peek()[1] != ")":
                self.error("expected ')'")
            self.take()
            return e
        if kind == "num":
            self.take()
            return LinearExpression.const(to_fraction(val))
        if kind == "id":
            self.take()
            return LinearExpression.var(val)
        self.error("expected a number, symbol or '('")


def parse_expression(text: str, line: int | None = None, col0: int = 0) -> LinearExpression:
    toks = _tokenize(text, line, col0)
    p = _ExprParser(toks, line)
    e = p.expr()
    if p.i != len(toks):
        p.error(f"unexpected token {p.peek()[1]!r}")
    return e




def parse_condition(text: str, line: int | None = None, col0: int = 0,
                    booleans: frozenset = frozenset()) -> Condition:
    toks = _tokenize(text, line, col0)
    if not toks:
        raise ParseError("empty condition", line, col0 + 1)
    # boolean literal sugar: `holding` or `not holding`
    if len(toks) == 1 and toks[0][0] == "id" and toks[0][1] in booleans:
        return Condition.compare(LinearExpression.var(toks[0][1]), ">=", 1)
    if len(toks) == 2 and toks[0][1] == "not" and toks[1][1] in booleans:
        return Condition.compare(LinearExpression.var(toks[1][1]), "<=", 0)
    rel_idx = [i for i, t in enumerate(toks) if t[1] in ("<=", "<", "=", ">=", ">")]
    if len(rel_idx) != 1:
        col = toks[rel_idx[1]][2] if len(rel_idx) > 1 else toks[0][2]
        raise ParseError("a condition needs exactly one relation", line, col)
    k = rel_idx[0]
    lp = _ExprParser(toks[:k], line)
    lhs = lp.expr()
    if lp.i != k:
        lp.error(f"unexpected token {lp.peek()[1]!r}")
    rp = _ExprParser(toks[k + 1:], line)
    rhs = rp.expr()
    if rp.i != len(toks) - k - 1:
        rp.error(f"unexpected token {rp.peek()[1]!r}")
    return Condition.compare(lhs, toks[k][1], rhs)


# --------------------------------------------------------------------------
# line handling


def _lines(text: str, comment: str = "#"):
    for no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split(comment, 1)[0]
        if body.strip():
            yield no, body


def _split_words(body: str):
    """Split on whitespace keeping the 1-based column of each word."""
    return [(m.group(0), m.start() + 1) for m in re.finditer(r"\S+", body)]


def _rest(body: str, words, k: int) -> tuple[str, int]:
    """Text after the k-th word and its 0-based column offset."""
    if k >= len(words):
        return "", len(body)
    col = words[k][1] - 1
    return body[col:], col


def _rational(word, line, col) -> Fraction:
    try:
        return to_fraction(word)
    except ValueError:
        raise ParseError(f"expected a rational, got {word!r}", line, col) from None


def _ident(word, line, col) -> str:
    if not word.isidentifier():
        raise ParseError(f"expected an identifier, got {word!r}", line, col)
    return word


# --------------------------------------------------------------------------
# problem documents


def parse_problem(text: str) -> ParametrizedProblem:
    name = "problem"
    epsilon = DEFAULT_EPSILON
    eps_pos = None
    params: list = []
    constants: list = []
    fluents: list = []
    actions: list = []
    goals: list = []
    booleans: set = set()
    # deferred symbol checks: (expr-or-cond, line, col, allowed-kinds)
    pending_exprs: list = []
    current = None

    for no, body in _lines(text):
        words = _split_words(body)
        kw, kcol = words[0]
        if current is not None:
            if kw == "end":
                actions.append(_finish_action(current, no))
                current = None
                continue
            _action_line(current, kw, words, body, no, booleans, pending_exprs)
            continue
        if kw == "problem":
            if len(words) != 2:
                raise ParseError("usage: problem <name>", no, kcol)
            name = _ident(words[1][0], no, words[1][1])
        elif kw == "epsilon":
            if len(words) != 2:
                raise ParseError("usage: epsilon <rational>", no, kcol)
            epsilon = _rational(words[1][0], no, words[1][1])
            eps_pos = (no, words[1][1])
        elif kw == "param":
            params.append(_param_line(words, no))
        elif kw == "const":
            if len(words) != 3:
                raise ParseError("usage: const <name> <rational>", no, kcol)
            constants.append((_ident(words[1][0], no, words[1][1]), _rational(words[2][0], no, words[2][1])))
        elif kw in ("fluent", "bool"):
            if len(words) < 2:
                raise ParseError(f"usage: {kw} <name> [= <value>]", no, kcol)
            fname = _ident(words[1][0], no, words[1][1])
            init = LinearExpression()
            if len(words) > 2:
                if words[2][0] != "=":
                    raise ParseError("expected '='", no, words[2][1])
                rest, col = _rest(body, words, 3)
                if kw == "bool":
                    val = rest.strip()
                    if val not in ("true", "false"):
                        raise ParseError("boolean initial value must be true or false", no, col + 1)
                    init = LinearExpression.const(1 if val == "true" else 0)
                else:
                    init = parse_expression(rest, no, col)
                    pending_exprs.append((init, no, col + 1, "init"))
            if kw == "bool":
                booleans.add(fname)
            fluents.append(Fluent(fname, init, kw == "bool"))
        elif kw == "action":
            if len(words) != 2:
                raise ParseError("usage: action <name>", no, kcol)
            current = {"name": _ident(words[1][0], no, words[1][1]), "line": no,
                       "at_start": [], "over_all": [], "at_end": [],
                       "start_effects": [], "end_effects": []}
        elif kw == "goal":
            rest, col = _rest(body, words, 1)
            deadline = None
            m = re.search(r"\bdeadline\b", rest)
            if m:
                dl = rest[m.end():].strip()
                deadline = _rational(dl, no, col + m.end() + 2)
                rest = rest[:m.start()]
            cond = parse_condition(rest, no, col, frozenset(booleans))
            pending_exprs.append((cond.expr, no, col + 1, "cond"))
            goals.append(Goal(cond, deadline))
        else:
            raise ParseError(f"unknown keyword {kw!r}", no, kcol)
    if current is not None:
        raise ParseError(f"action {current['name']!r} is missing 'end'", current["line"], 1)

    if epsilon <= 0:
        line, col = eps_pos if eps_pos else (None, None)
        raise InvalidProblem(f"epsilon must be positive, got {format_fraction(epsilon)}"
                             + (f" (line {line})" if line else ""))
    static = {p.name for p in params} | {c for c, _ in constants}
    allowed = {"init": static, "cond": static | {f.name for f in fluents},
               "target": {f.name for f in fluents}}
    for expr, line, col, kind in pending_exprs:
        missing = sorted(expr.variables - allowed[kind])
        if missing:
            raise UndeclaredSymbol(f"line {line}, column {col}: undeclared symbol {missing[0]!r}")
    problem = ParametrizedProblem(name, tuple(fluents), tuple(actions), tuple(goals),
                                  tuple(params), tuple(constants), epsilon)
    check_problem(problem)
    return problem


def _param_line(words, no) -> Parameter:
    if len(words) < 4 or words[2][0] != "nominal":
        raise ParseError("usage: param <name> nominal <rational> [weight <rational>]", no, words[0][1])
    pname = _ident(words[1][0], no, words[1][1])
    nominal = _rational(words[3][0], no, words[3][1])
    weight = Fraction(1)
    if len(words) > 4:
        if len(words) != 6 or words[4][0] != "weight":
            raise ParseError("expected 'weight <rational>'", no, words[4][1])
        weight = _rational(words[5][0], no, words[5][1])
    return Parameter(pname, nominal, weight)


def _action_line(cur, kw, words, body, no, booleans, pending):
    key = {"at-start": "at_start", "over-all": "over_all", "at-end": "at_end"}
    if kw in key:
        rest, col = _rest(body, words, 1)
        cond = parse_condition(rest, no, col, frozenset(booleans))
        pending.append((cond.expr, no, col + 1, "cond"))
        cur[key[kw]].append(cond)
    elif kw == "effect":
        if len(words) < 4 or words[1][0] not in ("at-start", "at-end"):
            raise ParseError("usage: effect at-start|at-end <fluent> := <expr>", no, words[0][1])
        fname = _ident(words[2][0], no, words[2][1])
        if words[3][0] != ":=":
            raise ParseError("expected ':='", no, words[3][1])
        rest, col = _rest(body, words, 4)
        if fname in booleans and rest.strip() in ("true", "false"):
            expr = LinearExpression.const(1 if rest.strip() == "true" else 0)
        else:
            expr = parse_expression(rest, no, col)
        pending.append((expr, no, col + 1, "cond"))
        pending.append((LinearExpression.var(fname), no, words[2][1], "target"))
        target = "start_effects" if words[1][0] == "at-start" else "end_effects"
        cur[target].append(Effect(fname, expr))
    else:
        raise ParseError(f"unknown action clause {kw!r}", no, words[0][1])


def _finish_action(cur, no) -> DurativeAction:
    for target in ("start_effects", "end_effects"):
        seen = set()
        for eff in cur[target]:
            if eff.fluent in seen:
                raise InvalidProblem(f"action {cur['name']}: two {target.replace('_', ' ')} on {eff.fluent}")
            seen.add(eff.fluent)
    return DurativeAction(cur["name"], tuple(cur["at_start"]), tuple(cur["over_all"]),
                          tuple(cur["at_end"]), tuple(cur["start_effects"]), tuple(cur["end_effects"]))


def check_problem(problem: ParametrizedProblem) -> None:
    """Raise if a symbol is undeclared or a structural invariant is broken."""
    if problem.epsilon <= 0:
        raise InvalidProblem("epsilon must be positive")
    names: dict = {}
    for kind, items in (("param", [p.name for p in problem.params]),
                        ("const", [c for c, _ in problem.constants]),
                        ("fluent", [f.name for f in problem.fluents]),
                        ("action", [a.name for a in problem.actions])):
        for n in items:
            if kind != "action" and n in names:
                raise InvalidProblem(f"symbol {n!r} declared twice")
            if kind == "action" and n in [a for a, k in names.items() if k == "action"]:
                raise InvalidProblem(f"action {n!r} declared twice")
            names.setdefault(n, kind)
    for p in problem.params:
        if p.nominal < 0:
            raise InvalidProblem(f"parameter {p.name}: nominal value must be >= 0")
        if p.weight <= 0:
            raise InvalidProblem(f"parameter {p.name}: weight must be > 0")
    symbols_static = set(problem.param_map) | set(problem.constant_map)
    symbols_all = symbols_static | set(problem.fluent_map)
    for f in problem.fluents:
        _require(f.init.variables, symbols_static, f"initial value of {f.name}")
    for a in problem.actions:
        for _, c in a.conditions():
            _require(c.variables, symbols_all, f"condition of {a.name}")
        for eff in a.start_effects + a.end_effects:
            _require({eff.fluent}, set(problem.fluent_map), f"effect target in {a.name}")
            _require(eff.expr.variables, symbols_all, f"effect of {a.name}")
        for effs in (a.start_effects, a.end_effects):
            targets = [e.fluent for e in effs]
            if len(set(targets)) != len(targets):
                raise InvalidProblem(f"action {a.name}: one happening writes a fluent twice")
    for g in problem.goals:
        _require(g.condition.variables, symbols_all, "goal")


def _require(used, declared, where):
    missing = sorted(set(used) - set(declared))
    if missing:
        raise UndeclaredSymbol(f"undeclared symbol {missing[0]!r} in {where}")


def print_problem(problem: ParametrizedProblem) -> str:
    out = [f"problem {problem.name}", f"epsilon {format_fraction(problem.epsilon)}"]
    for p in problem.params:
        line = f"param {p.name} nominal {format_fraction(p.nominal)}"
        if p.weight != 1:
            line += f" weight {format_fraction(p.weight)}"
        out.append(line)
    for n, v in problem.constants:
        out.append(f"const {n} {format_fraction(v)}")
    for f in problem.fluents:
        if f.boolean:
            out.append(f"bool {f.name} = {'true' if f.init.constant else 'false'}")
        else:
            out.append(f"fluent {f.name} = {f.init}")
    for a in problem.actions:
        out.append(f"action {a.name}")
        for kind, c in a.conditions():
            out.append(f"  {kind.replace('_', '-')} {c}")
        for when, effs in (("at-start", a.start_effects), ("at-end", a.end_effects)):
            for e in effs:
                out.append(f"  effect {when} {e.fluent} := {e.expr}")
        out.append("end")
    for g in problem.goals:
        line = f"goal {g.condition}"
        if g.deadline is not None:
            line += f" deadline {format_fraction(g.deadline)}"
        out.append(line)
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# STN plan documents


def parse_plan(text: str, problem: ParametrizedProblem) -> ParametrizedSTNPlan:
    from .validate import check_plan  # local import: validate depends on this module's types only

    name = "plan"
    tps: list = []
    cons: list = []
    order = None
    for no, body in _lines(text):
        words = _split_words(body)
        kw, kcol = words[0]
        if kw == "plan":
            if len(words) > 1:
                name = _ident(words[1][0], no, words[1][1])
        elif kw == "timepoint":
            tps.append(_timepoint_line(words, no))
        elif kw == "constraint":
            cons.append(_constraint_line(body, words, no))
        elif kw == "order":
            order = tuple(_ident(w, no, c) for w, c in words[1:])
        else:
            raise ParseError(f"unknown keyword {kw!r}", no, kcol)
    return check_plan(problem, tps, cons, order, name)


def _timepoint_line(words, no) -> TimePoint:
    if len(words) < 3:
        raise ParseError("usage: timepoint <name> plan-start | start <action> [k] | end <action> [k]", no, words[0][1])
    tname = _ident(words[1][0], no, words[1][1])
    kind = words[2][0]
    if kind == PLAN_START:
        if len(words) != 3:
            raise ParseError("plan-start takes no action", no, words[3][1])
        return TimePoint(tname, PLAN_START)
    if kind not in (START, END):
        raise ParseError(f"unknown timepoint kind {kind!r}", no, words[2][1])
    if len(words) not in (4, 5):
        raise ParseError(f"usage: timepoint <name> {kind} <action> [instance]", no, words[0][1])
    act = _ident(words[3][0], no, words[3][1])
    inst = 0
    if len(words) == 5:
        if not words[4][0].isdigit():
            raise ParseError("instance must be a non-negative integer", no, words[4][1])
        inst = int(words[4][0])
    return TimePoint(tname, kind, act, inst)


_CONSTRAINT_RE = re.compile(
    r"^\s*constraint\s+([A-Za-z_]\w*)\s*-\s*([A-Za-z_]\w*)\s*<=\s*(\S+)\s*$"
)


def _constraint_line(body, words, no) -> StnConstraint:
    m = _CONSTRAINT_RE.match(body)
    if not m:
        raise ParseError("usage: constraint <ti> - <tj> <= <rational | param | -param>", no, words[0][1])
    ti, tj, b = m.groups()
    col = m.start(3) + 1
    try:
        bound = make_bound(b if _is_param_ref(b) else to_fraction(b))
    except ValueError:
        raise ParseError(f"bad bound {b!r}", no, col) from None
    return StnConstraint(ti, tj, bound)


def _is_param_ref(s: str) -> bool:
    return s.lstrip("-").isidentifier()


def _format_bound(b: LinearExpression) -> str:
    if b.terms:
        n, c = b.terms[0]
        return n if c > 0 else f"-{n}"
    return format_fraction(b.constant)


def print_plan(plan: ParametrizedSTNPlan) -> str:
    out = [f"plan {plan.name}"]
    for t in plan.timepoints:
        if t.kind == PLAN_START:
            out.append(f"timepoint {t.name} plan-start")
        else:
            out.append(f"timepoint {t.name} {t.kind} {t.action} {t.instance}")
    for c in plan.constraints:
        out.append(f"constraint {c.ti} - {c.tj} <= {_format_bound(c.bound)}")
    out.append("order " + " ".join(plan.order))
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# time-triggered plans:  "<time>: (<action>) [<duration>]"

_TT_RE = re.compile(r"^\s*([0-9./]+)\s*:\s*\(\s*([A-Za-z_]\w*)\s*\)\s*\[\s*([0-9./]+)\s*\]\s*$")


def parse_tt_plan(text: str) -> TimeTriggeredPlan:
    acts = []
    for no, body in _lines(text, comment=";"):
        m = _TT_RE.match(body)
        if not m:
            raise ParseError("expected '<time>: (<action>) [<duration>]'", no, 1)
        start = _rational(m.group(1), no, m.start(1) + 1)
        dur = _rational(m.group(3), no, m.start(3) + 1)
        if start < 0 or dur < 0:
            raise ParseError("times and durations must be non-negative", no, 1)
        acts.append(TimedAction(start, m.group(2), dur))
    return TimeTriggeredPlan(tuple(acts))


def print_tt_plan(tt: TimeTriggeredPlan) -> str:
    return "".join(f"{format_fraction(a.start)}: ({a.action}) [{format_fraction(a.duration)}]\n"
                   for a in tt.actions)


def looks_like_tt_plan(text: str) -> bool:
    for _, body in _lines(text, comment=";"):
        if body.lstrip().startswith("#"):
            continue
        return bool(_TT_RE.match(body))
    return False


# --------------------------------------------------------------------------
# JSON mirrors


def expr_to_json(e: LinearExpression) -> dict:
    return {"const": format_fraction(e.constant),
            "terms": {n: format_fraction(c) for n, c in e.terms}}


def expr_from_json(d) -> LinearExpression:
    return LinearExpression.build(to_fraction(d.get("const", "0")),
                                  {n: to_fraction(c) for n, c in d.get("terms", {}).items()})


def _cond_to_json(c: Condition) -> dict:
    return {"expr": expr_to_json(c.expr), "op": c.op}


def _cond_from_json(d) -> Condition:
    return Condition(expr_from_json(d["expr"]), d["op"])


def problem_to_json(problem: ParametrizedProblem) -> dict:
    return {
        "name": problem.name,
        "epsilon": format_fraction(problem.epsilon),
        "params": [{"name": p.name, "nominal": format_fraction(p.nominal),
                    "weight": format_fraction(p.weight)} for p in problem.params],
        "constants": {n: format_fraction(v) for n, v in problem.constants},
        "fluents": [{"name": f.name, "type": "bool" if f.boolean else "real",
                     "init": expr_to_json(f.init)} for f in problem.fluents],
        "actions": [{
            "name": a.name,
            "at_start": [_cond_to_json(c) for c in a.at_start],
            "over_all": [_cond_to_json(c) for c in a.over_all],
            "at_end": [_cond_to_json(c) for c in a.at_end],
            "start_effects": [{"fluent": e.fluent, "expr": expr_to_json(e.expr)} for e in a.start_effects],
            "end_effects": [{"fluent": e.fluent, "expr": expr_to_json(e.expr)} for e in a.end_effects],
        } for a in problem.actions],
        "goals": [{"condition": _cond_to_json(g.condition),
                   "deadline": None if g.deadline is None else format_fraction(g.deadline)}
                  for g in problem.goals],
    }


def problem_from_json(d) -> ParametrizedProblem:
    if isinstance(d, str):
        d = json.loads(d)
    try:
        problem = ParametrizedProblem(
            d.get("name", "problem"),
            tuple(Fluent(f["name"], expr_from_json(f.get("init", {})), f.get("type") == "bool")
                  for f in d.get("fluents", [])),
            tuple(DurativeAction(
                a["name"],
                tuple(_cond_from_json(c) for c in a.get("at_start", [])),
                tuple(_cond_from_json(c) for c in a.get("over_all", [])),
                tuple(_cond_from_json(c) for c in a.get("at_end", [])),
                tuple(Effect(e["fluent"], expr_from_json(e["expr"])) for e in a.get("start_effects", [])),
                tuple(Effect(e["fluent"], expr_from_json(e["expr"])) for e in a.get("end_effects", [])),
            ) for a in d.get("actions", [])),
            tuple(Goal(_cond_from_json(g["condition"]),
                       None if g.get("deadline") is None else to_fraction(g["deadline"]))
                  for g in d.get("goals", [])),
            tuple(Parameter(p["name"], to_fraction(p["nominal"]), to_fraction(p.get("weight", "1")))
                  for p in d.get("params", [])),
            tuple((n, to_fraction(v)) for n, v in d.get("constants", {}).items()),
            to_fraction(d.get("epsilon", format_fraction(DEFAULT_EPSILON))),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed problem JSON: {exc}") from None
    check_problem(problem)
    return problem


def plan_to_json(plan: ParametrizedSTNPlan) -> dict:
    def bound(b):
        if b.terms:
            n, c = b.terms[0]
            return {"param": n, "sign": 1 if c > 0 else -1}
        return format_fraction(b.constant)

    return {
        "name": plan.name,
        "timepoints": [{"name": t.name, "kind": t.kind, "action": t.action, "instance": t.instance}
                       for t in plan.timepoints],
        "constraints": [{"ti": c.ti, "tj": c.tj, "bound": bound(c.bound)} for c in plan.constraints],
        "order": list(plan.order),
    }


def plan_from_json(d, problem: ParametrizedProblem) -> ParametrizedSTNPlan:
    from .validate import check_plan

    if isinstance(d, str):
        d = json.loads(d)
    try:
        tps = [TimePoint(t["name"], t["kind"], t.get("action"), t.get("instance"))
               for t in d["timepoints"]]
        cons = []
        for c in d.get("constraints", []):
            b = c["bound"]
            if isinstance(b, dict):
                bound = make_bound(("-" if b.get("sign", 1) < 0 else "") + b["param"])
            else:
                bound = make_bound(to_fraction(b))
            cons.append(StnConstraint(c["ti"], c["tj"], bound))
        order = tuple(d["order"]) if d.get("order") else None
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed plan JSON: {exc}") from None
    return check_plan(problem, tps, cons, order, d.get("name", "plan"))


__all__ = [
    "parse_expression", "parse_condition", "parse_problem", "print_problem", "parse_plan",
    "print_plan", "parse_tt_plan", "print_tt_plan", "looks_like_tt_plan", "problem_to_json",
    "problem_from_json", "plan_to_json", "plan_from_json", "check_problem", "IncompletePlan",
]
