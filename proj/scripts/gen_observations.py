#!/usr/bin/env python3
"""Regenerate data/observations_synthetic.csv.

Two strata of input/yield observations. Every point lies on or below the
conditional yield curve of its factor; a handful per factor sit exactly on it
so the frontier is recoverable.
"""
import csv
import math
import pathlib
import random

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "observations_synthetic.csv"

STRATA = {
    "center-hills": (8.4, {"nitrogen": (0.5, 0.5, 0.06, 200.0),
                           "weeds": (0.4, 0.4, 0.5, 12.0),
                           "insects": (0.3, 0.3, 0.7, 8.0)}),
    "north-plain": (9.1, {"nitrogen": (0.45, 0.4, 0.04, 250.0),
                          "weeds": (0.35, 0.3, 0.6, 10.0),
                          "insects": (0.25, 0.2, 0.9, 6.0)}),
}


def curve(ybar, s, sbar, lam, x):
    return ybar * ((1 - s) + sbar * (1 - math.exp(-lam * x)))


def main():
    rng = random.Random(20240611)
    rows = [("stratum", "factor", "x", "y")]
    for stratum, (ybar, factors) in STRATA.items():
        for name, (s, sbar, lam, xmax) in factors.items():
            for k in range(6):
                x = xmax * k / 5
                rows.append((stratum, name, "%.6g" % x, "%.10g" % curve(ybar, s, sbar, lam, x)))
            for _ in range(40):
                x = rng.uniform(0, xmax)
                y = curve(ybar, s, sbar, lam, x) - rng.uniform(0.05, 1.5)
                rows.append((stratum, name, "%.6g" % x, "%.6g" % max(y, 0.1)))
    with open(OUT, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


if __name__ == "__main__":
    main()
