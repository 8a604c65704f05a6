"""Run every registered experiment and print its headline aggregates.

    python3 scripts/run_all.py --out results --trials 1000 --jobs 4
"""

import argparse
import time
from pathlib import Path

from fdbeam.cli import RunManifest, run
from fdbeam.experiments import EXPERIMENTS

CONFIG = Path(__file__).resolve().parent.parent / "configs" / "table1.cfg"


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--config", type=Path, default=CONFIG)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("experiments", nargs="*", default=sorted(EXPERIMENTS))
    args = ap.parse_args()

    for name in args.experiments:
        t0 = time.perf_counter()
        result = run(RunManifest(args.config, name, args.out, args.seed, args.trials, args.jobs))
        print(f"{name}: {len(result.aggregates)} aggregate rows in {time.perf_counter() - t0:.1f} s")
        for key, value in result.summary.items():
            if key not in ("grid", "curves", "cells"):
                print(f"  {key}: {value}")


if __name__ == "__main__":
    main()
