#!/usr/bin/env python3
"""Reproduce the full face-milling case study into ./results.

Fits the 11-term response models to the builtin 27-run dataset, prints the
fit comparison against the published 7-term baseline, runs all five
multi-objective routines with their default parameter grids, and writes
fronts (CSV + SVG), per-routine outcome JSON, and the efficiency report.

Usage: python scripts/run_case_study.py [output_dir]
"""

import sys
from pathlib import Path

from pareto_forge.cli import main


def run(out_dir: str) -> int:
    rc = main(["fit", "--out", out_dir])
    if rc:
        return rc
    rc = main(["compare", "--out", out_dir])
    if rc:
        return rc
    print(f"\ncase study reproduced under {Path(out_dir).resolve()}")
    print("key artifacts: fit.json, comparison.csv, front_<method>.csv/.svg, "
          "outcome_<method>.json, efficiency.csv, front_all.svg")
    return 0


if __name__ == "__main__":
    sys.exit(run(sys.argv[1] if len(sys.argv) > 1 else "results"))
