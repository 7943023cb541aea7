"""Differential outcome metrics: per-group FMR/FNMR, Inequity and GARBE."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError
from .ingest import GENUINE, IMPOSTOR, ScoreDataset

DEFAULT_TARGET_FMR = 3e-4
DEFAULT_FLOOR = 1e-6

UNDER_RESOLVED = "under-resolved operating point"


@dataclass(frozen=True)
class ErrorRates:
    per_group: Mapping[str, float]
    kind: str  # "FMR" or "FNMR"
    threshold: float

    def values(self) -> np.ndarray:
        return np.array(list(self.per_group.values()), dtype=float)


@dataclass
class OutcomeReport:
    inequity_fmr: float
    inequity_fnmr: float
    garbe_fmr: float
    garbe_fnmr: float
    threshold: float
    target_fmr: float
    achieved_fmr: float
    floor_applied: bool
    fmr: ErrorRates
    fnmr: ErrorRates
    warnings: list[str] = field(default_factory=list)


def _nonempty(scores, what: str) -> np.ndarray:
    arr = np.asarray(scores, dtype=float)
    if arr.size == 0:
        raise DataError(f"no {what} scores")
    return arr


def fmr(impostor_scores: Sequence[float], tau: float) -> float:
    """Fraction of impostor scores accepted (``s >= tau``)."""
    arr = _nonempty(impostor_scores, IMPOSTOR)
    return np.count_nonzero(arr >= tau) / arr.size


def fnmr(genuine_scores: Sequence[float], tau: float) -> float:
    """Fraction of genuine scores rejected (``s < tau``)."""
    arr = _nonempty(genuine_scores, GENUINE)
    return np.count_nonzero(arr < tau) / arr.size


def threshold_at_fmr(all_impostor_scores: Sequence[float], target_fmr: float) -> tuple[float, float, bool]:
    """Smallest observed threshold whose pooled FMR does not exceed ``target_fmr``.

    Candidates are the observed scores plus the next float above the maximum,
    which always achieves FMR 0. Returns ``(tau, achieved_fmr, under_resolved)``;
    the flag is set when there are fewer than ``1 / target_fmr`` scores.
    """
    if not 0 < target_fmr < 1:
        raise ValueError(f"target FMR must lie in (0, 1), got {target_fmr}")
    arr = np.sort(_nonempty(all_impostor_scores, IMPOSTOR))
    n = arr.size
    candidates = np.append(np.unique(arr), np.nextafter(arr[-1], np.inf))
    accepted = n - np.searchsorted(arr, candidates, side="left")
    ok = np.flatnonzero(accepted / n <= target_fmr)
    j = ok[0]  # the last candidate always qualifies
    return float(candidates[j]), float(accepted[j] / n), n < 1.0 / target_fmr


def inequity(rates: ErrorRates | Sequence[float], floor: float = DEFAULT_FLOOR) -> tuple[float, bool]:
    """Max error rate over the geometric mean of all rates.

    Rates below ``floor`` are raised to it so that a group with zero errors
    does not zero the geometric mean. Returns ``(value, floor_applied)``.
    """
    r = rates.values() if isinstance(rates, ErrorRates) else np.asarray(rates, dtype=float)
    if r.size < 2:
        raise ValueError("inequity needs at least two groups")
    floored = np.maximum(r, floor)
    geomean = np.exp(np.mean(np.log(floored)))
    value = float(floored.max() / geomean)
    # exp/log rounding can dip a hair below the lower bound
    return max(value, 1.0), bool(np.any(r < floor))


def garbe(rates: ErrorRates | Sequence[float]) -> float:
    """Gini-style dispersion of error rates; 0 when all rates are zero."""
    r = rates.values() if isinstance(rates, ErrorRates) else np.asarray(rates, dtype=float)
    k = r.size
    if k < 2:
        raise ValueError("GARBE needs at least two groups")
    mean = r.mean()
    if mean == 0:
        return 0.0
    total = np.abs(r[:, None] - r[None, :]).sum()
    return float(total / (2 * k * k * mean))


def outcome_suite(ds: ScoreDataset, target_fmr: float = DEFAULT_TARGET_FMR,
                  floor: float = DEFAULT_FLOOR) -> OutcomeReport:
    tau, achieved, under = threshold_at_fmr(ds.pooled(IMPOSTOR), target_fmr)
    fmrs = ErrorRates({g.group: fmr(g.impostor, tau) for g in ds.groups}, "FMR", tau)
    fnmrs = ErrorRates({g.group: fnmr(g.genuine, tau) for g in ds.groups}, "FNMR", tau)
    in_fmr, floor_fmr = inequity(fmrs, floor)
    in_fnmr, floor_fnmr = inequity(fnmrs, floor)
    warnings = []
    if under:
        warnings.append(UNDER_RESOLVED)
    if floor_fmr:
        warnings.append("inequity floor applied (FMR)")
    if floor_fnmr:
        warnings.append("inequity floor applied (FNMR)")
    return OutcomeReport(
        inequity_fmr=in_fmr,
        inequity_fnmr=in_fnmr,
        garbe_fmr=garbe(fmrs),
        garbe_fnmr=garbe(fnmrs),
        threshold=tau,
        target_fmr=target_fmr,
        achieved_fmr=achieved,
        floor_applied=floor_fmr or floor_fnmr,
        fmr=fmrs,
        fnmr=fnmrs,
        warnings=warnings,
    )
