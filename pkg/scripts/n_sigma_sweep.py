"""Automated CEI parameters as a function of N on normal and heavy-tailed data.

The heavy-tailed cells are unit-variance Student-t draws whose one-sided
3-sigma mass is ``--tail-ratio`` times the normal one.

    python scripts/n_sigma_sweep.py --tail-ratio 2
"""
import argparse
import math

import numpy as np
from scipy import optimize, stats

from equity_metrics import EXTREME, auto_parameters
from equity_metrics.ingest import GroupScores, ScoreDataset
from equity_metrics.performance import cei_auto
from equity_metrics.synthetic import affine_normal_sample, affine_student_t_sample


def df_for_ratio(ratio, z=3.0):
    target = ratio * stats.norm.sf(z)
    return optimize.brentq(lambda df: stats.t.sf(z / math.sqrt((df - 2) / df), df) - target, 3.0, 1e4)


def build(sampler, groups, seed):
    return ScoreDataset(tuple(
        GroupScores(f"G{i}", sampler(0.8, [seed, i, 0]), sampler(0.2, [seed, i, 1]))
        for i in range(groups)))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--tail-ratio", type=float, default=2.0)
    ap.add_argument("--scale", type=float, default=0.04)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--groups", type=int, default=4)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()

    df = df_for_ratio(args.tail_ratio)
    data = {
        "normal": build(lambda loc, s: affine_normal_sample(loc, args.scale, args.samples, s),
                        args.groups, args.seed),
        f"t(df={df:.2f})": build(lambda loc, s: affine_student_t_sample(df, loc, args.scale, args.samples, s),
                                 args.groups, args.seed),
    }
    print(f"{'data':<14}{'kind':<10}{'N':>5}{'P(t)':>9}{'w_tail':>9}{'CEI^A_E':>9}")
    for label, ds in data.items():
        for kind in ("genuine", "impostor"):
            for n in np.arange(1.0, 4.01, 0.5):
                try:
                    p = auto_parameters(ds, kind, n)
                    value = cei_auto(ds, kind, EXTREME, n).value
                except ValueError as exc:
                    print(f"{label:<14}{kind:<10}{n:>5.1f}  {exc}")
                    continue
                print(f"{label:<14}{kind:<10}{n:>5.1f}{p.split_percentile:>9.3f}"
                      f"{p.weighting.w_tail:>9.4f}{value:>9.4f}")


if __name__ == "__main__":
    main()
