"""Distribution-level fairness: DFI, CEI and CEI with automated parameters.

Every index here is ``1 - normalized divergence`` where each group's
histogram is compared with the binwise mean over groups. ``normal``
averages the per-group divergences (normalizer ``K log2 K``), ``extreme``
takes the worst group (normalizer ``log2 K``). Both land in [0, 1] with 1
meaning identical distributions across groups.

CEI compares only one kind of score at a time (genuine or impostor) and
splits every histogram at a common score into a tail and a center part,
which are compared separately and blended with a tail weight.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .distributions import (
    DEFAULT_BINS,
    DEFAULT_EPSILON,
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
from .ingest import GENUINE, IMPOSTOR, KINDS, ScoreDataset, SummaryStats, summary_stats

NORMAL = "normal"
EXTREME = "extreme"
VARIANTS = (NORMAL, EXTREME)
MANUAL = "manual"
AUTOMATED = "automated"

DEFAULT_PERCENTILE = 95.0
DEFAULT_TAIL_WEIGHT = 0.8
DEFAULT_N_SIGMA = 3.0

THRESHOLD_CLAMPED = "threshold clamped to [0, 1]"
VALUE_CLAMPED = "value clamped to 0"

# errors live in the low genuine tail (FNMR) and the high impostor tail (FMR)
TAIL_DIRECTION = {GENUINE: LEFT, IMPOSTOR: RIGHT}


@dataclass(frozen=True)
class TailWeighting:
    w_tail: float
    source: str = MANUAL

    def __post_init__(self):
        if not 0.0 <= self.w_tail <= 1.0:
            raise ValueError(f"tail weight must lie in [0, 1], got {self.w_tail}")

    @property
    def w_center(self) -> float:
        return 1.0 - self.w_tail


@dataclass(frozen=True)
class CeiConfig:
    kind: str = GENUINE
    variant: str = EXTREME
    mode: str = MANUAL
    split_percentile: float = DEFAULT_PERCENTILE
    w_tail: float = DEFAULT_TAIL_WEIGHT
    n_sigma: float = DEFAULT_N_SIGMA
    bins: int = DEFAULT_BINS
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.mode not in (MANUAL, AUTOMATED):
            raise ValueError(f"mode must be 'manual' or 'automated', got {self.mode!r}")
        if self.mode == MANUAL and not 0 < self.split_percentile < 100:
            raise ValueError("split percentile must lie in (0, 100)")
        if self.mode == AUTOMATED and self.n_sigma <= 0:
            raise ValueError("n_sigma must be positive")
        TailWeighting(self.w_tail)


@dataclass(frozen=True)
class TailDeviation:
    group: str
    delta: float
    empirical_tail_mass: float
    gaussian_tail_mass: float

    @property
    def heaviness(self) -> float:
        return _sigmoid(self.delta)


@dataclass(frozen=True)
class AutoParameters:
    split_score: float
    split_percentile: float
    weighting: TailWeighting
    deviations: tuple[TailDeviation, ...]
    threshold_clamped: bool = False


@dataclass(frozen=True)
class CeiResult:
    value: float
    kind: str
    variant: str
    mode: str
    per_group_divergence: Mapping[str, float]
    split_percentile_used: float
    split_score_used: float
    weighting_used: TailWeighting
    clamp_flags: frozenset = field(default_factory=frozenset)
    deviations: tuple[TailDeviation, ...] = ()


def _sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def normal_tail(z: float) -> float:
    """Upper-tail probability of the standard normal at ``z``."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def aggregate(divergences: Sequence[float], variant: str) -> float:
    """``1 - sum/(K log2 K)`` for normal, ``1 - max/log2 K`` for extreme."""
    s = np.asarray(divergences, dtype=float)
    k = s.size
    if k < 2:
        raise DataError(f"K must be ≥ 2 (got {k})")
    if variant == NORMAL:
        return float(1.0 - s.sum() / (k * math.log2(k)))
    if variant == EXTREME:
        return float(1.0 - s.max() / math.log2(k))
    raise ValueError(f"unknown variant {variant!r}")


def dfi_divergences(ds: ScoreDataset, bins: int = DEFAULT_BINS,
                    epsilon: float = DEFAULT_EPSILON) -> dict[str, float]:
    """KL of each group's combined (genuine + impostor) histogram from the mean."""
    hists = [build_histogram(g.combined(), bins) for g in ds.groups]
    mean = mean_distribution(hists)
    return {g.group: kl_divergence(h, mean, epsilon) for g, h in zip(ds.groups, hists)}


def dfi(ds: ScoreDataset, variant: str = NORMAL, bins: int = DEFAULT_BINS,
        epsilon: float = DEFAULT_EPSILON) -> float:
    return aggregate(list(dfi_divergences(ds, bins, epsilon).values()), variant)


def split_divergence(group_dist: SplitDistribution, mean_center: EmpiricalDistribution,
                     mean_tail: EmpiricalDistribution, w: TailWeighting,
                     epsilon: float = DEFAULT_EPSILON) -> float:
    """Tail-weighted KL of a split group distribution from the mean parts, in bits."""
    return (w.w_tail * kl_divergence(group_dist.tail, mean_tail, epsilon)
            + w.w_center * kl_divergence(group_dist.center, mean_center, epsilon))


def split_groups(ds: ScoreDataset, kind: str, split_score: float, split_percentile: float,
                 bins: int = DEFAULT_BINS) -> list[SplitDistribution]:
    """Split every group's ``kind`` histogram at the common ``split_score``."""
    direction = TAIL_DIRECTION[kind]
    splits = []
    for g in ds.groups:
        scores = g.scores(kind)
        if scores.size == 0:
            raise DataError(f"group {g.group!r} has no {kind} scores")
        hist = build_histogram(scores, bins)
        try:
            splits.append(split_distribution(hist, split_score, direction, split_percentile))
        except DegenerateSplitError as exc:
            raise DegenerateSplitError(f"group {g.group!r}, {kind} scores: {exc}") from None
    return splits


def empty_part_flags(ds: ScoreDataset, splits: Sequence[SplitDistribution]) -> set[str]:
    flags = set()
    for g, s in zip(ds.groups, splits):
        if s.tail_mass_raw == 0:
            flags.add(f"empty tail treated as uniform: {g.group}")
        if s.center_mass_raw == 0:
            flags.add(f"empty center treated as uniform: {g.group}")
    return flags


def split_divergences(ds: ScoreDataset, kind: str, split_score: float, split_percentile: float,
                      weighting: TailWeighting, bins: int = DEFAULT_BINS,
                      epsilon: float = DEFAULT_EPSILON,
                      splits: Sequence[SplitDistribution] | None = None) -> dict[str, float]:
    """Tail-weighted divergence of each group's split histogram from the mean parts.

    The mean tail and mean center are binwise means of the groups'
    renormalized parts.
    """
    if splits is None:
        splits = split_groups(ds, kind, split_score, split_percentile, bins)
    mean_tail = mean_distribution([s.tail for s in splits])
    mean_center = mean_distribution([s.center for s in splits])
    return {g.group: split_divergence(s, mean_center, mean_tail, weighting, epsilon)
            for g, s in zip(ds.groups, splits)}


def tail_deviation(group_scores: Sequence[float], t: float, stats: SummaryStats,
                   direction: str, group: str = "") -> TailDeviation:
    """Relative excess of empirical tail mass beyond ``t`` over a fitted normal.

    ``delta = (m_emp - m_gauss) / m_gauss``: 0 for a Gaussian tail, -1 for an
    empty one, positive for heavier-than-Gaussian tails.
    """
    arr = np.asarray(group_scores, dtype=float)
    if arr.size == 0:
        raise DataError("tail deviation of an empty sequence")
    if stats.std_dev <= 0:
        raise DegenerateDistributionError(f"degenerate distribution for group {group!r}: zero spread")
    z = (t - stats.mean) / stats.std_dev
    if direction == RIGHT:
        m_emp = np.count_nonzero(arr > t) / arr.size
        m_gauss = normal_tail(z)
    elif direction == LEFT:
        m_emp = np.count_nonzero(arr < t) / arr.size
        m_gauss = normal_tail(-z)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    if m_gauss < 1e-300:
        raise DataError(f"threshold beyond numeric range for group {group!r} ({abs(z):.1f} sigma)")
    return TailDeviation(group, (m_emp - m_gauss) / m_gauss, float(m_emp), m_gauss)


def automated_tail_weight(deltas: Sequence[float], percentile: float) -> float:
    """Mean over groups of ``sigmoid(delta_i) * percentile / 100``."""
    if len(deltas) == 0:
        raise ValueError("no tail deviations")
    scale = percentile / 100.0
    return float(np.mean([_sigmoid(d) * scale for d in deltas]))


def auto_parameters(ds: ScoreDataset, kind: str, n_sigma: float = DEFAULT_N_SIGMA) -> AutoParameters:
    """Split score, split percentile and tail weight from an N-sigma rule.

    The threshold comes from the pooled scores of ``kind``; each group's tail
    is then compared with its own normal fit at that common threshold.
    """
    direction = TAIL_DIRECTION[kind]
    pooled = ds.pooled(kind)
    t, clamped = sigma_threshold(summary_stats(pooled), n_sigma, direction)
    percentile = empirical_percentile(pooled, t, direction)
    if percentile >= 100.0:
        raise DegenerateSplitError(f"no tail mass at N sigma (N={n_sigma}, {kind} scores)")
    deviations = tuple(
        tail_deviation(g.scores(kind), t, summary_stats(g.scores(kind)), direction, g.group)
        for g in ds.groups
    )
    w_tail = automated_tail_weight([d.delta for d in deviations], percentile)
    return AutoParameters(t, percentile, TailWeighting(w_tail, AUTOMATED), deviations, clamped)


def cei(ds: ScoreDataset, config: CeiConfig) -> CeiResult:
    direction = TAIL_DIRECTION[config.kind]
    flags = set()
    deviations: tuple[TailDeviation, ...] = ()
    if config.mode == MANUAL:
        percentile = config.split_percentile
        split_score = percentile_score(ds.pooled(config.kind), percentile, direction)
        weighting = TailWeighting(config.w_tail, MANUAL)
    else:
        params = auto_parameters(ds, config.kind, config.n_sigma)
        percentile, split_score = params.split_percentile, params.split_score
        weighting, deviations = params.weighting, params.deviations
        if params.threshold_clamped:
            flags.add(THRESHOLD_CLAMPED)

    splits = split_groups(ds, config.kind, split_score, percentile, config.bins)
    flags |= empty_part_flags(ds, splits)
    divs = split_divergences(ds, config.kind, split_score, percentile, weighting,
                             config.bins, config.epsilon, splits)
    value = aggregate(list(divs.values()), config.variant)
    if value < 0:
        value = 0.0
        flags.add(VALUE_CLAMPED)
    return CeiResult(
        value=value,
        kind=config.kind,
        variant=config.variant,
        mode=config.mode,
        per_group_divergence=divs,
        split_percentile_used=float(percentile),
        split_score_used=float(split_score),
        weighting_used=weighting,
        clamp_flags=frozenset(flags),
        deviations=deviations,
    )


def cei_auto(ds: ScoreDataset, kind: str, variant: str = EXTREME, n_sigma: float = DEFAULT_N_SIGMA,
             bins: int = DEFAULT_BINS, epsilon: float = DEFAULT_EPSILON) -> CeiResult:
    return cei(ds, CeiConfig(kind=kind, variant=variant, mode=AUTOMATED, n_sigma=n_sigma,
                             bins=bins, epsilon=epsilon))
