"""Sampling noise of the outcome metrics on a perfectly fair system.

With identical groups, the impostors accepted at the pooled threshold are
spread over groups multinomially, whatever the score distributions are.
This prints the resulting distribution of GARBE_FMR and IN_FMR, and the
FAIR-scenario values over a range of seeds for comparison.

    python scripts/fair_noise.py --target-fmr 3e-4
"""
import argparse

import numpy as np

from equity_metrics import ScenarioSpec, garbe, generate_scenario, inequity, outcome_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--groups", type=int, default=4)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--target-fmr", type=float, default=3e-4)
    ap.add_argument("--draws", type=int, default=20_000)
    ap.add_argument("--seeds", type=int, default=10, help="FAIR scenario seeds 0..seeds-1")
    args = ap.parse_args()

    k, n = args.groups, args.samples
    accepted = int(round(args.target_fmr * k * n))
    rng = np.random.default_rng(0)
    counts = rng.multinomial(accepted, np.full(k, 1 / k), size=args.draws)
    rates = counts / n
    g = np.array([garbe(r) for r in rates])
    ineq = np.array([inequity(r)[0] for r in rates])
    print(f"{accepted} accepted impostors over {k} groups of {n}")
    print(f"GARBE_FMR: mean {g.mean():.4f}, P(<= 0.05) = {np.mean(g <= 0.05):.3f}")
    print(f"IN_FMR:    mean {ineq.mean():.4f}, P(<= 1.2) = {np.mean(ineq <= 1.2):.3f}")

    print("\nFAIR scenario by seed")
    for seed in range(args.seeds):
        ds = generate_scenario(ScenarioSpec("FAIR", n_groups=k, samples_per_cell=n, seed=seed))
        o = outcome_suite(ds, args.target_fmr)
        print(f"seed {seed:>3}: GARBE_FMR {o.garbe_fmr:.4f}  IN_FMR {o.inequity_fmr:.4f}  "
              f"GARBE_FNMR {o.garbe_fnmr:.4f}")


if __name__ == "__main__":
    main()
