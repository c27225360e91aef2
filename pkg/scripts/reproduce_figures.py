"""Write the data grid behind every figure panel to CSV files."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from dqs.cli import FIGURES, main as dqs_main


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--outdir", default="figure_data")
    p.add_argument("--only", nargs="*", choices=sorted(FIGURES), help="subset of panels")
    args = p.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name in args.only or FIGURES:
        path = out / f"{name}.csv"
        code = dqs_main(["figure", name, "--out", str(path)])
        print(f"{name}: exit {code} -> {path}")
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
