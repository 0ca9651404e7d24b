"""Regenerate the context-dependence and De Zela comparison tables as CSV under results/."""
from __future__ import annotations

import math
import sys
from pathlib import Path

from pathspin.cli import build_rows, parse_config, render

ROOT = Path(__file__).resolve().parent.parent


def main(out_dir: Path = ROOT / "results") -> None:
    out_dir.mkdir(exist_ok=True)
    gammas = [i / 10 for i in range(11)]
    thetas = [0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8]
    runs = {
        "pan_home.csv": ["pan-home", *[a for g in gammas for a in ("--gamma", repr(g))],
                         *[a for t in thetas for a in ("--theta", repr(t))]],
        "compare.csv": ["compare", *[a for k in range(9) for a in ("--vartheta", repr(k * math.pi / 8))],
                        *[a for t in thetas for a in ("--theta", repr(t))]],
    }
    for name, argv in runs.items():
        cfg = parse_config(argv)
        rows = build_rows(cfg)
        (out_dir / name).write_text(render(cfg.command, rows, "csv"))
        print(f"  {name:14s} {len(rows):4d} rows")

    theta = math.pi / 8
    print(f"\nweighted SG1 mean vs gamma at theta = pi/8 (whole-ensemble mean alongside):")
    for row in build_rows(parse_config(["pan-home", "--theta", repr(theta),
                                        *[a for g in gammas for a in ("--gamma", repr(g))]])):
        print(f"  gamma={row['gamma']:.2f}  sg1={row['weighted_mean_sg1']:+.6f}  "
              f"sg2={row['weighted_mean_sg2']:+.6f}  total={row['total_expectation']:+.1e}")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "results")
