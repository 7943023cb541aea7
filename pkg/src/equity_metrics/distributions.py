"""Histogram distributions on [0, 1], KL divergence, percentiles and tail splits.

All distributions share a uniform bin grid so that binwise means and
divergences are well defined. Divergences are in bits.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, DegenerateDistributionError, DegenerateSplitError
from .ingest import SummaryStats

RIGHT = "right"
LEFT = "left"
DIRECTIONS = (RIGHT, LEFT)

DEFAULT_BINS = 100
DEFAULT_EPSILON = 1e-10


def uniform_edges(bins: int) -> np.ndarray:
    # i/B rather than linspace: edges land on the correctly rounded decimals
    return np.arange(bins + 1) / bins


def _check_direction(direction: str) -> None:
    if direction not in DIRECTIONS:
        raise ValueError(f"tail direction must be 'left' or 'right', got {direction!r}")


@dataclass(frozen=True)
class EmpiricalDistribution:
    bin_edges: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        masses = np.asarray(self.masses, dtype=float)
        if edges.ndim != 1 or masses.shape != (edges.size - 1,):
            raise ValueError("need B+1 edges for B masses")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")
        if np.any(masses < 0):
            raise ValueError("negative bin mass")
        edges.setflags(write=False)
        masses.setflags(write=False)
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "masses", masses)

    @property
    def bins(self) -> int:
        return self.masses.size

    def same_grid(self, other: "EmpiricalDistribution") -> bool:
        return self.bin_edges.shape == other.bin_edges.shape and bool(
            np.array_equal(self.bin_edges, other.bin_edges))


@dataclass(frozen=True)
class SplitDistribution:
    """A distribution cut at ``split_score`` into renormalized center and tail.

    ``center`` and ``tail`` keep only their own bins, so their edges are the
    matching sub-slices of the parent grid. ``tail_bins`` is a boolean mask
    over the parent grid.
    """

    center: EmpiricalDistribution
    tail: EmpiricalDistribution
    split_score: float
    split_percentile: float
    tail_direction: str
    tail_mass_raw: float
    center_mass_raw: float
    tail_bins: np.ndarray


def build_histogram(scores: Sequence[float], bins: int = DEFAULT_BINS) -> EmpiricalDistribution:
    """Normalized counts over ``bins`` uniform bins on [0, 1].

    A score of exactly 1.0 falls into the last bin.
    """
    arr = np.asarray(scores, dtype=float)
    if arr.size == 0:
        raise DataError("cannot build a histogram from no scores")
    if bins < 2:
        raise ValueError(f"need at least 2 bins, got {bins}")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise DataError("scores outside [0, 1]")
    idx = np.minimum((arr * bins).astype(np.int64), bins - 1)
    # arr*bins can round up across an edge; bin i holds [i/B, (i+1)/B)
    edges = uniform_edges(bins)
    idx -= (arr < edges[idx]).astype(np.int64)
    idx += (idx < bins - 1) & (arr >= edges[np.minimum(idx + 1, bins)])
    counts = np.bincount(idx, minlength=bins)
    return EmpiricalDistribution(edges, counts / arr.size)


def mean_distribution(dists: Sequence[EmpiricalDistribution]) -> EmpiricalDistribution:
    if len(dists) < 1:
        raise ValueError("mean of no distributions")
    first = dists[0]
    for d in dists[1:]:
        if not first.same_grid(d):
            raise ValueError("distributions are on different bin grids")
    masses = np.mean(np.stack([d.masses for d in dists]), axis=0)
    return EmpiricalDistribution(first.bin_edges, masses)


def kl_divergence(p: EmpiricalDistribution, q: EmpiricalDistribution,
                  epsilon: float = DEFAULT_EPSILON) -> float:
    """D_KL(p || q) in bits, after adding ``epsilon`` to every bin and renormalizing."""
    if not p.same_grid(q):
        raise ValueError("distributions are on different bin grids")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    ps = p.masses + epsilon
    qs = q.masses + epsilon
    ps = ps / ps.sum()
    qs = qs / qs.sum()
    return max(float(np.sum(ps * np.log2(ps / qs))), 0.0)


def sigma_threshold(stats: SummaryStats, n_sigma: float, direction: str) -> tuple[float, bool]:
    """``mu +/- n_sigma * sigma`` clamped to [0, 1].

    Returns ``(threshold, clamped)``.
    """
    _check_direction(direction)
    if n_sigma <= 0:
        raise ValueError("n_sigma must be positive")
    if stats.std_dev == 0:
        raise DegenerateDistributionError("degenerate distribution: zero standard deviation")
    offset = n_sigma * stats.std_dev
    raw = stats.mean + offset if direction == RIGHT else stats.mean - offset
    t = min(max(raw, 0.0), 1.0)
    return t, t != raw


def empirical_percentile(scores: Sequence[float], t: float, direction: str) -> float:
    """Percentage of scores on the center side of ``t``.

    Right tails count ``x <= t``, left tails count ``x >= t``.
    """
    _check_direction(direction)
    arr = np.asarray(scores, dtype=float)
    if arr.size == 0:
        raise DataError("percentile of an empty sequence")
    hits = np.count_nonzero(arr <= t) if direction == RIGHT else np.count_nonzero(arr >= t)
    return 100.0 * hits / arr.size


def percentile_score(scores: Sequence[float], percentile: float, direction: str) -> float:
    """Observed score at which the center side first holds ``percentile`` percent.

    For right tails this is the smallest score ``t`` with
    ``empirical_percentile(scores, t, RIGHT) >= percentile``; for left tails
    it is the largest ``t`` with ``empirical_percentile(scores, t, LEFT) >= percentile``.
    """
    _check_direction(direction)
    arr = np.sort(np.asarray(scores, dtype=float))
    n = arr.size
    if n == 0:
        raise DataError("percentile of an empty sequence")
    if not 0 < percentile <= 100:
        raise ValueError(f"percentile must lie in (0, 100], got {percentile}")
    # smallest count k with 100*k/n >= percentile
    k = int(np.ceil(percentile * n / 100.0))
    while k > 1 and 100.0 * (k - 1) / n >= percentile:
        k -= 1
    while 100.0 * k / n < percentile:
        k += 1
    if direction == RIGHT:
        # ties only add to the count at arr[k-1]
        return float(arr[k - 1])
    return float(arr[n - k])


def split_distribution(dist: EmpiricalDistribution, split_score: float, direction: str,
                       split_percentile: float) -> SplitDistribution:
    """Partition bins at ``split_score`` and renormalize each side.

    Right tails take bins whose lower edge is >= ``split_score``; left tails
    take bins whose upper edge is <= ``split_score``. A side that owns bins
    but no mass becomes uniform over its bins, which is what epsilon
    smoothing converges to; a side without any bins is an error.
    """
    _check_direction(direction)
    edges = dist.bin_edges
    if not edges[0] < split_score < edges[-1]:
        raise DegenerateSplitError(f"split score {split_score} not inside the score range")
    if direction == RIGHT:
        tail_bins = edges[:-1] >= split_score
    else:
        tail_bins = edges[1:] <= split_score
    if not tail_bins.any():
        raise DegenerateSplitError(f"degenerate split: no tail bins at score {split_score}")
    if tail_bins.all():
        raise DegenerateSplitError(f"degenerate split: no center bins at score {split_score}")
    tail_mass = float(dist.masses[tail_bins].sum())
    center_mass = float(dist.masses[~tail_bins].sum())
    tail_bins.setflags(write=False)
    return SplitDistribution(
        center=_part(dist, ~tail_bins, center_mass),
        tail=_part(dist, tail_bins, tail_mass),
        split_score=float(split_score),
        split_percentile=float(split_percentile),
        tail_direction=direction,
        tail_mass_raw=tail_mass,
        center_mass_raw=center_mass,
        tail_bins=tail_bins,
    )


def _part(dist: EmpiricalDistribution, mask: np.ndarray, mass: float) -> EmpiricalDistribution:
    # tail and center are each a contiguous run of bins
    idx = np.flatnonzero(mask)
    lo, hi = idx[0], idx[-1] + 1
    if mass > 0:
        masses = dist.masses[lo:hi] / mass
    else:
        masses = np.full(hi - lo, 1.0 / (hi - lo))
    return EmpiricalDistribution(dist.bin_edges[lo:hi + 1], masses)


def reassemble(split: SplitDistribution) -> np.ndarray:
    """Undo :func:`split_distribution`: full-grid masses from the two parts."""
    out = np.empty(split.tail_bins.size)
    out[split.tail_bins] = split.tail.masses * split.tail_mass_raw
    out[~split.tail_bins] = split.center.masses * split.center_mass_raw
    return out
