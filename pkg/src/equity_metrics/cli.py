"""Command-line front end.

Exit codes: 0 success, 1 data or validation failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import performance as perf
from .distributions import (DEFAULT_BINS, DEFAULT_EPSILON, build_histogram, mean_distribution,
                            percentile_score)
from .errors import DataError
from .ingest import DEFAULT_MIN_PER_CELL, KINDS, dataset_to_csv, parse_score_csv
from .outcome import DEFAULT_FLOOR, DEFAULT_TARGET_FMR
from .report import METRICS, Settings, _clean, build_report, to_json, to_table
from .synthetic import SCENARIOS, ScenarioSpec, generate_scenario

SEED_ENV = "EQUITY_METRICS_SEED"


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _metric_list(text):
    names = tuple(m.strip().lower() for m in text.split(",") if m.strip())
    unknown = [m for m in names if m not in METRICS]
    if unknown or not names:
        raise argparse.ArgumentTypeError(
            f"unknown metric(s) {', '.join(unknown)}; choose from {', '.join(METRICS)}")
    return names


def _add_metric_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.add_argument("--bins", type=_positive_int, default=DEFAULT_BINS)
    p.add_argument("--epsilon", type=_positive_float, default=DEFAULT_EPSILON)
    p.add_argument("--target-fmr", type=_positive_float, default=DEFAULT_TARGET_FMR)
    p.add_argument("--floor", type=_positive_float, default=DEFAULT_FLOOR)
    p.add_argument("--n-sigma", type=_positive_float, default=perf.DEFAULT_N_SIGMA)
    p.add_argument("--percentile", type=float, default=perf.DEFAULT_PERCENTILE,
                   help="manual CEI split percentile (center-side mass)")
    p.add_argument("--tail-weight", type=float, default=perf.DEFAULT_TAIL_WEIGHT,
                   help="manual CEI tail weight; the center weight is its complement")
    p.add_argument("--metrics", type=_metric_list, default=METRICS,
                   help=f"comma-separated subset of {','.join(METRICS)}")
    p.add_argument("--min-per-cell", type=int, default=DEFAULT_MIN_PER_CELL)
    p.add_argument("--allow-small-cells", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="equity-metrics",
                                     description="Demographic bias metrics from verification scores.")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="compute the metric suite for a score CSV")
    ev.add_argument("--input", required=True)
    _add_metric_options(ev)

    syn = sub.add_parser("synthetic", help="generate a Beta-score scenario")
    syn.add_argument("--scenario", required=True, type=str.upper, choices=SCENARIOS)
    syn.add_argument("--seed", type=int, default=None,
                     help=f"defaults to ${SEED_ENV}, then 0")
    syn.add_argument("--samples", type=_positive_int, default=100_000,
                     help="scores per (group, kind) cell")
    syn.add_argument("--groups", type=int, default=4)
    syn.add_argument("--report", action="store_true",
                     help="also evaluate the generated data and print the report")
    _add_metric_options(syn)

    ex = sub.add_parser("export", help="write per-group histograms as JSON")
    ex.add_argument("--input", required=True)
    ex.add_argument("--out")
    ex.add_argument("--bins", type=_positive_int, default=DEFAULT_BINS)
    ex.add_argument("--percentile", type=float, default=None,
                    help="include manual CEI split thresholds at this percentile")
    ex.add_argument("--n-sigma", type=_positive_float, default=None,
                    help="include automated CEI split thresholds for this N")
    return parser


def _settings(args, parser, seed=None) -> Settings:
    if not 0 < args.percentile < 100:
        parser.error("--percentile must lie in (0, 100)")
    if not 0 <= args.tail_weight <= 1:
        parser.error("--tail-weight must lie in [0, 1]")
    if not 0 < args.target_fmr < 1:
        parser.error("--target-fmr must lie in (0, 1)")
    if args.bins < 2:
        parser.error("--bins must be at least 2")
    return Settings(bins=args.bins, epsilon=args.epsilon, target_fmr=args.target_fmr,
                    floor=args.floor, n_sigma=args.n_sigma, percentile=args.percentile,
                    tail_weight=args.tail_weight, metrics=args.metrics,
                    min_per_cell=args.min_per_cell, allow_small_cells=args.allow_small_cells,
                    seed=seed)


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(report: dict, fmt: str) -> str:
    return to_json(report) if fmt == "json" else to_table(report)


def run_evaluate(args, parser) -> int:
    settings = _settings(args, parser)
    ds = parse_score_csv(args.input)
    _emit(_render(build_report(ds, settings), args.format), args.out)
    return 0


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise DataError(f"${SEED_ENV} is not an integer: {env!r}") from None
    return 0


def run_synthetic(args, parser) -> int:
    if args.groups < 2:
        parser.error("--groups must be at least 2")
    seed = resolve_seed(args.seed)
    if not 0 <= seed < 2**64:
        parser.error("--seed must be a 64-bit unsigned integer")
    settings = _settings(args, parser, seed=seed)
    spec = ScenarioSpec(args.scenario, n_groups=args.groups, samples_per_cell=args.samples, seed=seed)
    ds = generate_scenario(spec)
    if args.report:
        if args.out:
            _emit(dataset_to_csv(ds), args.out)
        sys.stdout.write(_render(build_report(ds, settings), args.format))
    else:
        _emit(dataset_to_csv(ds), args.out)
    return 0


def export_distributions(ds, bins: int = DEFAULT_BINS, percentile: float | None = None,
                         n_sigma: float | None = None) -> dict:
    """Per-group genuine/impostor/combined histograms plus their binwise means."""
    hists = {kind: [build_histogram(g.scores(kind), bins) for g in ds.groups] for kind in KINDS}
    combined = [build_histogram(g.combined(), bins) for g in ds.groups]
    out = {
        "bin_edges": list(hists["genuine"][0].bin_edges),
        "groups": [
            {
                "group": g.group,
                "genuine_masses": list(hists["genuine"][i].masses),
                "impostor_masses": list(hists["impostor"][i].masses),
                "combined_masses": list(combined[i].masses),
            }
            for i, g in enumerate(ds.groups)
        ],
        "mean": {
            "genuine_masses": list(mean_distribution(hists["genuine"]).masses),
            "impostor_masses": list(mean_distribution(hists["impostor"]).masses),
            "combined_masses": list(mean_distribution(combined).masses),
        },
    }
    splits = {}
    if percentile is not None:
        splits["manual"] = {
            kind: {"split_percentile": percentile,
                   "split_score": percentile_score(ds.pooled(kind), percentile,
                                                   perf.TAIL_DIRECTION[kind])}
            for kind in KINDS
        }
    if n_sigma is not None:
        auto = {}
        for kind in KINDS:
            p = perf.auto_parameters(ds, kind, n_sigma)
            auto[kind] = {"split_percentile": p.split_percentile, "split_score": p.split_score,
                          "w_tail": p.weighting.w_tail}
        splits["automated"] = auto
    if splits:
        out["splits"] = splits
    return out


def run_export(args, parser) -> int:
    if args.bins < 2:
        parser.error("--bins must be at least 2")
    if args.percentile is not None and not 0 < args.percentile < 100:
        parser.error("--percentile must lie in (0, 100)")
    ds = parse_score_csv(args.input)
    data = _clean(export_distributions(ds, args.bins, args.percentile, args.n_sigma))
    _emit(json.dumps(data, indent=2) + "\n", args.out)
    return 0


COMMANDS = {"evaluate": run_evaluate, "synthetic": run_synthetic, "export": run_export}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, parser)
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
