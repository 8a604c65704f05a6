"""Print selected metrics from an aggregates CSV written by ``fdbeam run``.

    python3 scripts/summarize.py results/fig3_rate_vs_snr.csv unit_norm constant_amplitude
"""

import csv
import sys
from collections import defaultdict


def main(path, *metrics):
    table = defaultdict(dict)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            if not metrics or row["metric"] in metrics:
                table[row["metric"]][float(row["sweep"])] = float(row["value"])
    for metric, by_sweep in table.items():
        print(metric)
        for sweep in sorted(by_sweep):
            print(f"  {sweep:>8g}  {by_sweep[sweep]:.4f}")


if __name__ == "__main__":
    if len(sys.argv) < 2:
        sys.exit(__doc__)
    main(*sys.argv[1:])
