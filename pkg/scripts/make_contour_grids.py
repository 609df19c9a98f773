#!/usr/bin/env python3
"""Emit the standard contour-grid family as CSV files.

Covers the score surfaces that show how the blend weight and interval width
reshape the ranking rule: the figure-series parameters (z in {0, 2, 5, 10},
P in {0, 0.25, 0.5, 0.75}) for the whole/net/positive kinds, for each
requested transform, plus the two baselines (original Wilson bound and plain
average rating) for reference.

Full resolution (--step 1) emits 1001x1001 grids like the canonical setup;
the default step 10 keeps iteration quick.
"""

import argparse
import os
import sys
from pathlib import Path

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from spotrank.grids import (
    AverageRatingScorer,
    GridSpec,
    ImprovedScorer,
    SweepSpec,
    WilsonScorer,
    emit_csv,
    grid_scores,
    sweep,
)
from spotrank.scoring import LINEAR, LOG10, Maxima, ScoringConfig, SiKind, SiTransform, poly


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="contour_grids", help="output directory")
    parser.add_argument("--range", type=int, default=1000, dest="axis_range",
                        help="inclusive top of both vote axes (default 1000)")
    parser.add_argument("--n-max", type=int, default=None,
                        help="fixed n_max (default: 2x the axis range)")
    parser.add_argument("--step", type=int, default=10, help="cell spacing (default 10)")
    parser.add_argument("--transforms", default="linear,log,poly2",
                        help="comma list from linear, log, exp, poly<a> (default linear,log,poly2)")
    return parser.parse_args()


def transform_of(token: str) -> SiTransform:
    if token.startswith("poly"):
        return poly(float(token[4:] or 2))
    return {"linear": LINEAR, "log": LOG10, "exp": SiTransform("exp")}[token]


def main() -> int:
    args = parse_args()
    n_max = args.n_max if args.n_max is not None else 2 * args.axis_range
    maxima = Maxima(n_max, n_max, n_max)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    base = GridSpec(args.axis_range, args.axis_range, maxima,
                    ImprovedScorer(ScoringConfig()), args.step)
    spec = SweepSpec(
        base=base,
        z_values=(0.0, 2.0, 5.0, 10.0),
        p_values=(0.0, 0.25, 0.5, 0.75),
        kinds=(SiKind.WHOLE, SiKind.NET, SiKind.POSITIVE),
        transforms=tuple(transform_of(t.strip()) for t in args.transforms.split(",")),
    )
    count = 0
    for point, grid in sweep(spec):
        path = out_dir / f"grid_{point.slug()}.csv"
        emit_csv(grid, path)
        count += 1
        print(path)

    for name, scorer in (
        ("baseline_wilson_z2", WilsonScorer(2.0)),
        ("baseline_average", AverageRatingScorer()),
    ):
        grid = grid_scores(GridSpec(args.axis_range, args.axis_range, maxima, scorer, args.step))
        path = out_dir / f"{name}.csv"
        emit_csv(grid, path)
        count += 1
        print(path)

    print(f"wrote {count} grids to {out_dir}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
