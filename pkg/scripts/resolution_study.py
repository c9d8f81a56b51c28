"""Formula agreement as the disk rule is refined.

For each curve the maps are solved once; the five formulas are then
evaluated on a ladder of rules (panels and angles doubled together) and
the worst pairwise residual is recorded.  Coarse rungs show the decay
rate before the residual reaches rounding level.

    python3 scripts/resolution_study.py --out results/resolution_study.csv
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

from loewnerframes.energy import formula_values, pairwise_residuals, recentre, solve_pair
from loewnerframes.geometry import parse_curve_spec
from loewnerframes.quadrature import disk_rule

CURVES = ["ellipse:0.1", "ellipse:0.2", "ellipse:0.3", "poly:0,1,0.05", "poly:0,1,0,0.1"]
LADDER = [(2, 8, 32), (4, 8, 64), (8, 8, 128), (8, 16, 256), (8, 16, 512), (16, 16, 1024)]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--out", default="results/resolution_study.csv")
    ap.add_argument("--curves", nargs="*", default=CURVES)
    args = ap.parse_args(argv)

    rows = []
    for spec in args.curves:
        c, _ = recentre(parse_curve_spec(spec))
        f, gt = solve_pair(c)
        prev = None
        for panels, gauss, angles in LADDER:
            results, _ = formula_values(f, gt, disk_rule(panels, gauss, angles), grunsky=False)
            values = {k: v.value for k, v in results.items()}
            worst = max(pairwise_residuals(values).values())
            ratio = "" if prev is None or worst == 0 else prev / worst
            rows.append({"curve": spec, "panels": panels, "gauss": gauss, "angles": angles,
                         "s1": values["s1"], "max_residual": worst, "ratio": ratio})
            print(f"{spec:<16} {panels:>3}/{gauss:>2}/{angles:<5} s1 {values['s1']: .14f} "
                  f"residual {worst:.2e} {'' if ratio == '' else f'x{ratio:.1f}'}")
            prev = worst

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        wr = csv.DictWriter(fh, fieldnames=list(rows[0]))
        wr.writeheader()
        wr.writerows(rows)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
