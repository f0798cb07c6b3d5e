"""IRR on every bundled fixture: DREs, snapshot logs and a convergence CSV.

    python scripts/run_convergence.py --out results/convergence
"""
from __future__ import annotations

import argparse
import json
from fractions import Fraction
from pathlib import Path

from dre.cli import convergence_table
from dre.data import FIXTURES, fixture
from dre.encoder import encode
from dre.irr import convergence, run_irr, write_snapshots


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/convergence")
    ap.add_argument("--beta", default="1")
    ap.add_argument("--budget-steps", type=int)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    runs = []
    print(f"{'fixture':<20} {'params':>6} {'steps':>6} {'1st wid':>7} {'ms':>8} {'@50':>6}")
    for name in FIXTURES:
        res = run_irr(encode(*fixture(name)), Fraction(args.beta), budget_steps=args.budget_steps)
        write_snapshots(res.snapshots, out / f"{name}.snapshots.jsonl")
        (out / f"{name}.dre.json").write_text(json.dumps(res.to_json(), indent=2) + "\n")
        at50 = max((p for s, p in convergence(res.snapshots) if s <= 50), default=0)
        print(f"{name:<20} {len(res.dre.names):>6} {res.steps:>6} {res.first_widening_step!s:>7} "
              f"{res.wallclock_ms:>8.1f} {float(at50):>5.0f}%")
        runs.append(res.snapshots)
    with open(out / "convergence.csv", "w", encoding="utf-8") as fh:
        fh.write("step,min,median,max\n")
        for step, lo, med, hi in convergence_table(runs):
            fh.write(f"{step},{float(lo):.6g},{float(med):.6g},{float(hi):.6g}\n")
    print(f"wrote {out}/convergence.csv")


if __name__ == "__main__":
    main()
