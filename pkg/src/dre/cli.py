"""``dre`` command line: compute envelopes, check points, run campaigns, report convergence.

Exit codes: 0 ok, 1 point/rectangle outside the envelope (check-envelope
only), 2 input/parse error, 3 invalid nominal plan, 4 IRR budget exhausted,
5 campaign configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import statistics
import sys
from fractions import Fraction
from pathlib import Path

from . import data
from .dispatch.campaign import CampaignConfig, ConfigError, simulate_campaign
from .encoder import encode
from .irr import DONE, DRE, EnvelopeChecker, InvalidNominal, convergence, read_snapshots, run_irr
from .lra.smtlib import SmtLibError, SubprocessSolver
from .lra.solver import DEFAULT_BUDGET
from .model.expr import format_fraction, to_fraction
from .model.parametrize import parametrize
from .model.parser import looks_like_tt_plan, parse_plan, parse_problem, parse_tt_plan
from .model.problem import ModelError

EXIT_OK, EXIT_OUTSIDE, EXIT_PARSE, EXIT_INVALID_NOMINAL, EXIT_BUDGET, EXIT_CONFIG = 0, 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return to_fraction(text)
    except (TypeError, ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _assignment(text: str):
    name, sep, val = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"expected name=value, got {text!r}")
    return name.strip(), _rational(val.strip())


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None


def load_inputs(problem_path, plan_path, directives=()):
    """Parametrized problem and STN plan from files.

    A time-triggered plan is parametrized with ``directives``; an STN plan
    must come with a problem that already declares its parameters.
    """
    problem = parse_problem(_read(problem_path))
    text = _read(plan_path)
    if looks_like_tt_plan(text):
        return parametrize(problem, parse_tt_plan(text), list(directives))
    if directives:
        raise UsageError("--directive only applies to time-triggered plans")
    return problem, parse_plan(text, problem)


def _backend(spec):
    if spec is None or spec == "builtin":
        return None
    return SubprocessSolver(spec)


def _load_dre(path) -> DRE:
    try:
        doc = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from None
    items = doc["parameters"] if isinstance(doc, dict) else doc
    return DRE.from_json(items)


# -- commands -----------------------------------------------------------------

def cmd_compute_dre(args) -> int:
    problem, plan = load_inputs(args.problem, args.plan, args.directive)
    enc = encode(problem, plan)
    if args.dump_encoding:
        enc.dump(args.dump_encoding)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    snap_path = Path(args.snapshots) if args.snapshots else out.with_suffix(".snapshots.jsonl")
    checker = EnvelopeChecker(enc, DEFAULT_BUDGET, _backend(args.smt_backend))
    with open(snap_path, "w", encoding="utf-8") as log:
        def observer(snap):
            log.write(json.dumps(snap.to_json()) + "\n")
            log.flush()

        res = run_irr(enc, args.beta, dict(args.omega or []), observer,
                      budget_steps=args.budget_steps, budget_seconds=args.budget_seconds,
                      checker=checker)
    out.write_text(json.dumps(res.to_json(), indent=2) + "\n", encoding="utf-8")
    print(res.dre)
    status = "converged" if res.converged else "budget exhausted"
    print(f"{status} after {res.steps} steps ({res.checks} checks, {res.wallclock_ms:.0f} ms)",
          file=sys.stderr)
    return EXIT_OK if res.converged else EXIT_BUDGET


def cmd_check_envelope(args) -> int:
    problem, plan = load_inputs(args.problem, args.plan, args.directive)
    enc = encode(problem, plan)
    if args.dre:
        R = _load_dre(args.dre)
    else:
        point = dict(args.point or [])
        missing = [p.name for p in problem.params if p.name not in point]
        if missing:
            raise UsageError(f"no value for parameter(s): {', '.join(missing)}")
        R = DRE.point(point)
    if set(R.names) != {p.name for p in problem.params}:
        raise UsageError("rectangle parameters do not match the problem's parameters")
    checker = EnvelopeChecker(enc, DEFAULT_BUDGET, _backend(args.smt_backend))
    witness = checker.counterexample(R)
    if witness is None:
        print(f"inside: {R}")
        return EXIT_OK
    shown = {k: format_fraction(v) for k, v in sorted(witness.items()) if k in R.names}
    print(f"outside: {R}")
    print(f"counterexample parameters: {shown}")
    return EXIT_OUTSIDE


def cmd_simulate(args) -> int:
    source = args.config
    if source in data.CAMPAIGNS:
        source = data.campaign_path(source)
    cfg = CampaignConfig.load(source)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.episodes is not None:
        cfg.episodes = args.episodes
    res = simulate_campaign(cfg, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    res.write_csv(out / "results.csv")
    res.write_traces(out / "traces.jsonl")
    print(f"{cfg.name} (seed {cfg.seed}, {len(res.episodes) // len(cfg.policies)} episodes)")
    print(res.table())
    broken = [e for e in res.episodes if not e.guarantee_ok]
    if broken:
        print(f"warning: {len(broken)} DREEx episodes stayed inside the envelope yet failed",
              file=sys.stderr)
    return EXIT_OK


def convergence_table(runs) -> list:
    """Rows ``(step, min, median, max)`` over runs, each run carried forward past its end."""
    series = []
    for snaps in runs:
        conv = convergence(snaps)
        if conv:
            series.append(conv)
    steps = sorted({s for conv in series for s, _ in conv})
    rows = []
    for step in steps:
        vals = []
        for conv in series:
            cur = [p for s, p in conv if s <= step]
            vals.append(cur[-1] if cur else Fraction(0))
        rows.append((step, min(vals), statistics.median(vals), max(vals)))
    return rows


def _pct(x) -> str:
    return f"{float(x):.6g}"


def cmd_report(args) -> int:
    runs = []
    for p in args.logs:
        try:
            snaps = read_snapshots(p)
        except (OSError, ValueError, KeyError) as exc:
            raise UsageError(f"cannot read snapshot log {p}: {exc}") from None
        if not snaps or snaps[-1].event != DONE:
            if not args.allow_partial:
                raise UsageError(f"{p}: run did not complete (use --allow-partial)")
        runs.append(snaps)
    rows = convergence_table(runs)
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(["step", "min", "median", "max"])
        for step, lo, med, hi in rows:
            w.writerow([step, _pct(lo), _pct(med), _pct(hi)])
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------

def _common_inputs(p):
    p.add_argument("problem", help="problem file (parametrized, or base problem for a .tt plan)")
    p.add_argument("plan", help="STN plan or time-triggered plan")
    p.add_argument("--directive", action="append", default=[],
                   help="parametrization directive for a time-triggered plan, "
                        "e.g. 'duration a1 as g1' or 'rate a battery'")
    p.add_argument("--smt-backend", default="builtin",
                   help="'builtin' or a command running an SMT-LIB2 solver on stdin")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dre", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute-dre", help="grow a decoupled robustness envelope with IRR")
    _common_inputs(p)
    p.add_argument("--beta", type=_rational, default=Fraction(1))
    p.add_argument("--omega", type=_assignment, action="append", metavar="NAME=VAL")
    p.add_argument("--budget-steps", type=int)
    p.add_argument("--budget-seconds", type=float)
    p.add_argument("--dump-encoding", metavar="DIR")
    p.add_argument("--out", default="dre.json")
    p.add_argument("--snapshots", help="snapshot log path (default: next to --out)")
    p.set_defaults(func=cmd_compute_dre)

    p = sub.add_parser("check-envelope", help="check a point or rectangle against the envelope")
    _common_inputs(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--dre", help="DRE JSON document")
    g.add_argument("--point", type=_assignment, action="append", metavar="NAME=VAL")
    p.set_defaults(func=cmd_check_envelope)

    p = sub.add_parser("simulate", help="run a dispatch campaign")
    p.add_argument("config", help=f"campaign JSON, or one of: {', '.join(data.CAMPAIGNS)}")
    p.add_argument("--seed", type=int)
    p.add_argument("--episodes", type=int, help="episodes per instance (overrides config)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default="campaign-out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="convergence CSV from snapshot logs")
    p.add_argument("logs", nargs="+")
    p.add_argument("--allow-partial", action="store_true")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InvalidNominal as exc:
        print(f"error: invalid nominal plan: {exc}", file=sys.stderr)
        return EXIT_INVALID_NOMINAL
    except ConfigError as exc:
        print(f"error: bad campaign config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ModelError, UsageError, SmtLibError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
