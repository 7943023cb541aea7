"""Demographic bias metrics for 1:1 verification systems, computed from scores.

Outcome metrics (Inequity, GARBE) look at per-group error rates at one
operating threshold; distribution metrics (DFI, CEI, automated CEI) compare
per-group score histograms.
"""
from .performance import (
    AUTOMATED,
    EXTREME,
    MANUAL,
    NORMAL,
    CeiConfig,
    CeiResult,
    TailDeviation,
    TailWeighting,
    auto_parameters,
    cei,
    cei_auto,
    dfi,
    split_divergence,
    tail_deviation,
)
from .distributions import (
    LEFT,
    RIGHT,
    EmpiricalDistribution,
    SplitDistribution,
    build_histogram,
    empirical_percentile,
    kl_divergence,
    mean_distribution,
    percentile_score,
    sigma_threshold,
    split_distribution,
)
from .errors import DataError, DegenerateDistributionError, DegenerateSplitError
from .ingest import (
    GENUINE,
    IMPOSTOR,
    GroupScores,
    ScoreDataset,
    ScoreRecord,
    SummaryStats,
    parse_score_csv,
    summary_stats,
    validate_dataset,
    write_score_csv,
)
from .outcome import ErrorRates, OutcomeReport, fmr, fnmr, garbe, inequity, outcome_suite, threshold_at_fmr
from .report import Settings, build_report
from .synthetic import ScenarioSpec, beta_sample, generate_scenario

__version__ = "0.1.0"
