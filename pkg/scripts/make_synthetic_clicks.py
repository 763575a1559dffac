#!/usr/bin/env python3
"""Regenerate data/synthetic_clicks.csv, the in-repo stand-in for the
click-through case-study file (see docs/case-study-data.md).

Shape mimics the real data: one row per ad impression with a device key and
a binary click column; keys repeat, so grouping by key yields zero-inflated
right-skewed per-device click counts.  1000 distinct keys.
"""

import csv
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "synthetic_clicks.csv"
N_KEYS = 1000
SEED = 715


def main():
    rng = np.random.default_rng(SEED)
    rows = []
    for i in range(N_KEYS):
        key = f"ip{i:04d}"
        n_impressions = 1 + rng.poisson(6)
        # most devices never click; a few click a lot
        if rng.random() < 0.66:
            clicks = np.zeros(n_impressions, dtype=int)
        else:
            clicks = (rng.random(n_impressions) <
                      rng.beta(0.8, 6.0)).astype(int)
        for c in clicks:
            rows.append((key, int(c)))
    order = rng.permutation(len(rows))
    OUT.parent.mkdir(exist_ok=True)
    with open(OUT, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["device_ip", "click"])
        for i in order:
            w.writerow(rows[i])
    print(f"wrote {len(rows)} rows, {N_KEYS} keys -> {OUT}")


if __name__ == "__main__":
    main()
