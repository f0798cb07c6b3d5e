"""Both bundled dispatch campaigns (duration- and consumption-uncertain).

    python scripts/run_campaigns.py --jobs 4 --out results/campaigns
"""
from __future__ import annotations

import argparse
import time
from pathlib import Path

from dre.data import campaign_path
from dre.dispatch import CampaignConfig, simulate_campaign


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/campaigns")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--seed", type=int)
    ap.add_argument("campaigns", nargs="*", default=["delivery-s", "delivery-s-battery"])
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.campaigns:
        cfg = CampaignConfig.load(campaign_path(name))
        if args.seed is not None:
            cfg.seed = args.seed
        t = time.perf_counter()
        res = simulate_campaign(cfg, jobs=args.jobs)
        res.write_csv(out / f"{name}.csv")
        res.write_traces(out / f"{name}.traces.jsonl")
        print(f"\n{cfg.name}: seed {cfg.seed}, {len(res.episodes) // len(cfg.policies)} episodes, "
              f"{time.perf_counter() - t:.0f} s")
        print(res.table())


if __name__ == "__main__":
    main()
