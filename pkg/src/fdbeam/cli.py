"""``fdbeam`` command line: run registered experiments and write CSV outputs."""
from __future__ import annotations

import argparse
import csv
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

from .config import ConfigError, format_config, parse_config_keys
from .experiments import AGGREGATE_HEADER, EXPERIMENTS, SAMPLE_HEADER, ExperimentResult
from .optimizer import OptimizationError


@dataclass(frozen=True)
class RunManifest:
    config: Path | None
    experiment: str
    out: Path
    seed: int = 0
    trials: int | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}"
            )
        if self.trials is not None and self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {self.jobs}")


def _cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def run(manifest: RunManifest) -> ExperimentResult:
    text = manifest.config.read_text(encoding="utf-8") if manifest.config else ""
    cfg, explicit = parse_config_keys(text)
    cfg = replace(cfg, master_seed=manifest.seed)
    if manifest.trials is not None:
        cfg = replace(cfg, trials=manifest.trials)
        explicit = explicit | {"trials"}

    start = time.perf_counter()
    result = EXPERIMENTS[manifest.experiment](cfg, explicit, jobs=manifest.jobs)
    elapsed = time.perf_counter() - start

    manifest.out.mkdir(parents=True, exist_ok=True)
    name = manifest.experiment
    write_csv(manifest.out / f"{name}.csv", AGGREGATE_HEADER, result.aggregates)
    write_csv(manifest.out / f"{name}_samples.csv", SAMPLE_HEADER, result.samples)
    meta = [
        f"experiment = {name}",
        f"config_path = {manifest.config}",
        f"seed = {manifest.seed}",
        f"trials = {cfg.trials}",
        f"jobs = {manifest.jobs}",
        f"wall_time_s = {elapsed:.3f}",
        "",
        "# effective configuration (before experiment-specific defaults)",
        format_config(cfg),
    ]
    (manifest.out / f"{name}_meta.txt").write_text("\n".join(meta), encoding="utf-8")
    return result


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="fdbeam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a registered experiment")
    p_run.add_argument("--config", type=Path, required=True)
    p_run.add_argument("--experiment", required=True)
    p_run.add_argument("--out", type=Path, required=True)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--trials", type=int)
    p_run.add_argument("--jobs", type=int, default=1)

    sub.add_parser("list", help="list registered experiments")

    args = parser.parse_args(argv)
    if args.command == "list":
        for name, fn in EXPERIMENTS.items():
            print(f"{name}\t{(fn.__doc__ or '').strip().splitlines()[0]}")
        return 0

    try:
        manifest = RunManifest(args.config, args.experiment, args.out, args.seed, args.trials, args.jobs)
        run(manifest)
    except (ConfigError, ValueError, OSError, OptimizationError) as exc:
        print(f"fdbeam: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
