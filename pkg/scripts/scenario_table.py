"""Metric table over the synthetic scenarios (FAIR, BG, BI, BC).

    python scripts/scenario_table.py --seed 42 --samples 100000
"""
import argparse

from equity_metrics import EXTREME, NORMAL, CeiConfig, ScenarioSpec, cei, dfi, generate_scenario, outcome_suite
from equity_metrics.performance import cei_auto
from equity_metrics.synthetic import SCENARIOS

ROWS = ["IN_FMR", "IN_FNMR", "GARBE_FMR", "GARBE_FNMR", "DFI_N", "DFI_E",
        "CEI_N,G", "CEI_E,G", "CEI_N,I", "CEI_E,I",
        "CEI^A_N,G", "CEI^A_E,G", "CEI^A_N,I", "CEI^A_E,I"]


def metrics(ds, n_sigma):
    o = outcome_suite(ds)
    out = {"IN_FMR": o.inequity_fmr, "IN_FNMR": o.inequity_fnmr,
           "GARBE_FMR": o.garbe_fmr, "GARBE_FNMR": o.garbe_fnmr,
           "DFI_N": dfi(ds, NORMAL), "DFI_E": dfi(ds, EXTREME)}
    for kind in ("genuine", "impostor"):
        for variant in (NORMAL, EXTREME):
            tag = f"{variant[0].upper()},{kind[0].upper()}"
            out[f"CEI_{tag}"] = cei(ds, CeiConfig(kind=kind, variant=variant)).value
            out[f"CEI^A_{tag}"] = cei_auto(ds, kind, variant, n_sigma).value
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--groups", type=int, default=4)
    ap.add_argument("--n-sigma", type=float, default=3.0)
    args = ap.parse_args()

    cols = {}
    for name in SCENARIOS:
        spec = ScenarioSpec(name, n_groups=args.groups, samples_per_cell=args.samples, seed=args.seed)
        cols[name] = metrics(generate_scenario(spec), args.n_sigma)
    print(f"{'metric':<12}" + "".join(f"{s:>10}" for s in SCENARIOS))
    for row in ROWS:
        print(f"{row:<12}" + "".join(f"{cols[s][row]:>10.4f}" for s in SCENARIOS))


if __name__ == "__main__":
    main()
