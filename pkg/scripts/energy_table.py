"""Energy of the standard test curves by all five formulas.

Writes one CSV row per curve with the formula values, the worst pairwise
residual, the Grunsky residual and the wall time.

    python3 scripts/energy_table.py --out results/energy_table.csv
"""

from __future__ import annotations

import argparse
import csv
import time
from pathlib import Path

from loewnerframes.energy import FORMULAS, EnergyConfig, full_report
from loewnerframes.geometry import parse_curve_spec

CURVES = ["circle", "circle:2", "ellipse:0.1", "ellipse:0.2", "ellipse:0.3", "ellipse:0.2@0.3,0.2",
          "poly:0,1,0.05", "poly:0,1,0,0.1"]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", default="results/energy_table.csv")
    ap.add_argument("--curves", nargs="*", default=CURVES)
    ap.add_argument("--mobius", action="store_true", help="also re-solve on the inverted curve")
    args = ap.parse_args(argv)

    rows = []
    for spec in args.curves:
        start = time.perf_counter()
        rep = full_report(parse_curve_spec(spec), EnergyConfig(mobius=args.mobius))
        row = {"curve": spec, **rep.values, "max_residual": rep.max_residual,
               "grunsky_residual": rep.grunsky_residual,
               "loewner_energy": rep.loewner_energy, "seconds": time.perf_counter() - start}
        if rep.mobius:
            row["mobius_residual"] = rep.mobius["residual"]
        rows.append(row)
        print(f"{spec:<22} s1 {rep.s1: .12f}  max residual {rep.max_residual:.1e}  "
              f"grunsky {rep.grunsky_residual:.1e}  {row['seconds']:.2f} s")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    fields = ["curve", *FORMULAS, "max_residual", "grunsky_residual", "loewner_energy", "seconds"]
    if args.mobius:
        fields.append("mobius_residual")
    with out.open("w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=fields)
        wr.writeheader()
        wr.writerows(rows)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
