"""Assemble the full metric suite into a deterministic, JSON-ready report."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields

from . import performance as perf
from .performance import AUTOMATED, EXTREME, MANUAL, NORMAL, CeiConfig, CeiResult
from .distributions import DEFAULT_BINS, DEFAULT_EPSILON
from .ingest import DEFAULT_MIN_PER_CELL, KINDS, ScoreDataset, summary_stats, validate_dataset
from .outcome import DEFAULT_FLOOR, DEFAULT_TARGET_FMR, outcome_suite
from .errors import DataError

METRICS = ("inequity", "garbe", "dfi", "cei", "cei_auto")
SIG_DIGITS = 10


@dataclass(frozen=True)
class Settings:
    """Every knob that affects a report; echoed verbatim into it."""

    bins: int = DEFAULT_BINS
    epsilon: float = DEFAULT_EPSILON
    target_fmr: float = DEFAULT_TARGET_FMR
    floor: float = DEFAULT_FLOOR
    n_sigma: float = perf.DEFAULT_N_SIGMA
    percentile: float = perf.DEFAULT_PERCENTILE
    tail_weight: float = perf.DEFAULT_TAIL_WEIGHT
    metrics: tuple[str, ...] = METRICS
    min_per_cell: int = DEFAULT_MIN_PER_CELL
    allow_small_cells: bool = False
    seed: int | None = None

    def __post_init__(self):
        unknown = set(self.metrics) - set(METRICS)
        if unknown:
            raise ValueError(f"unknown metric(s): {', '.join(sorted(unknown))}")
        # canonical order keeps reports independent of how --metrics was spelled
        object.__setattr__(self, "metrics", tuple(m for m in METRICS if m in self.metrics))

    def echo(self) -> dict:
        out = asdict(self)
        out["metrics"] = list(self.metrics)
        return out

    @classmethod
    def from_echo(cls, echo: dict) -> "Settings":
        known = {f.name for f in fields(cls)}
        kwargs = {k: v for k, v in echo.items() if k in known}
        if "metrics" in kwargs:
            kwargs["metrics"] = tuple(kwargs["metrics"])
        return cls(**kwargs)


def fmt(x: float) -> float:
    """Round to 10 significant digits so that printed reports are stable."""
    if not math.isfinite(x):
        return x
    return float(f"{x:.{SIG_DIGITS}g}")


def _clean(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return fmt(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item"):
        return _clean(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _stats_entry(scores) -> dict:
    if len(scores) == 0:
        return {"count": 0}
    s = summary_stats(scores)
    return {"count": s.count, "mean": s.mean, "std_dev": s.std_dev, "min": s.min, "max": s.max}


def _cei_entry(r: CeiResult) -> dict:
    entry = {
        "mode": r.mode,
        "kind": r.kind,
        "variant": r.variant,
        "value": r.value,
        "split_percentile": r.split_percentile_used,
        "split_score": r.split_score_used,
        "w_tail": r.weighting_used.w_tail,
        "w_center": r.weighting_used.w_center,
        "per_group_divergence": dict(r.per_group_divergence),
        "flags": sorted(r.clamp_flags),
    }
    if r.deviations:
        entry["tail_deviation"] = {
            d.group: {"delta": d.delta, "empirical_tail_mass": d.empirical_tail_mass,
                      "gaussian_tail_mass": d.gaussian_tail_mass}
            for d in r.deviations
        }
    return entry


def build_report(ds: ScoreDataset, settings: Settings = Settings()) -> dict:
    """Run the requested metrics on ``ds`` and return the report as a plain dict.

    Raises :class:`DataError` when a cell is below ``min_per_cell`` and small
    cells were not explicitly allowed.
    """
    validation = validate_dataset(ds, settings.min_per_cell)
    warnings: list[str] = []
    if not validation.ok:
        cells = ", ".join(f"{g}/{k}" for g, k in validation.flags)
        if not settings.allow_small_cells:
            raise DataError(f"cells below {settings.min_per_cell} scores: {cells}")
        warnings.append(f"small cells allowed: {cells}")

    report: dict = {
        "config": settings.echo(),
        "dataset": {
            "K": ds.K,
            "groups": [
                {"group": g.group, **{k: _stats_entry(g.scores(k)) for k in KINDS}}
                for g in ds.groups
            ],
        },
    }

    wanted = settings.metrics
    if "inequity" in wanted or "garbe" in wanted:
        o = outcome_suite(ds, settings.target_fmr, settings.floor)
        outcome = {
            "threshold": o.threshold,
            "target_fmr": o.target_fmr,
            "achieved_fmr": o.achieved_fmr,
            "fmr": dict(o.fmr.per_group),
            "fnmr": dict(o.fnmr.per_group),
        }
        if "inequity" in wanted:
            outcome.update(inequity_fmr=o.inequity_fmr, inequity_fnmr=o.inequity_fnmr,
                           floor_applied=o.floor_applied)
        if "garbe" in wanted:
            outcome.update(garbe_fmr=o.garbe_fmr, garbe_fnmr=o.garbe_fnmr)
        report["outcome"] = outcome
        warnings.extend(o.warnings)

    if "dfi" in wanted:
        divs = perf.dfi_divergences(ds, settings.bins, settings.epsilon)
        report["dfi_normal"] = perf.aggregate(list(divs.values()), NORMAL)
        report["dfi_extreme"] = perf.aggregate(list(divs.values()), EXTREME)
        report["dfi_per_group_divergence"] = divs

    modes = [m for m, name in ((MANUAL, "cei"), (AUTOMATED, "cei_auto")) if name in wanted]
    if modes:
        entries = []
        for mode in modes:
            for kind in KINDS:
                for variant in (NORMAL, EXTREME):
                    cfg = CeiConfig(kind=kind, variant=variant, mode=mode,
                                    split_percentile=settings.percentile,
                                    w_tail=settings.tail_weight, n_sigma=settings.n_sigma,
                                    bins=settings.bins, epsilon=settings.epsilon)
                    result = perf.cei(ds, cfg)
                    entries.append(_cei_entry(result))
                    warnings.extend(f"{mode} CEI ({kind}, {variant}): {f}"
                                    for f in sorted(result.clamp_flags))
        report["cei"] = entries

    report["warnings"] = warnings
    return _clean(report)


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


_OUTCOME_LABELS = {
    "inequity_fmr": "IN_FMR",
    "inequity_fnmr": "IN_FNMR",
    "garbe_fmr": "GARBE_FMR",
    "garbe_fnmr": "GARBE_FNMR",
}


def to_table(report: dict) -> str:
    rows: list[tuple[str, str]] = []

    def add(name, value):
        rows.append((name, f"{value:.{SIG_DIGITS}g}" if isinstance(value, float) else str(value)))

    ds = report["dataset"]
    add("groups (K)", ds["K"])
    for g in ds["groups"]:
        add(f"  {g['group']} genuine/impostor", f"{g['genuine']['count']}/{g['impostor']['count']}")
    if "outcome" in report:
        o = report["outcome"]
        add("threshold", o["threshold"])
        add("achieved FMR", o["achieved_fmr"])
        for key, label in _OUTCOME_LABELS.items():
            if key in o:
                add(label, o[key])
    if "dfi_normal" in report:
        add("DFI_N", report["dfi_normal"])
        add("DFI_E", report["dfi_extreme"])
    for e in report.get("cei", []):
        name = "CEI^A" if e["mode"] == AUTOMATED else "CEI"
        add(f"{name}_{e['variant'][0].upper()},{e['kind'][0].upper()}", e["value"])
        add("  split (P, score, w_tail)",
            f"{e['split_percentile']:.4g}, {e['split_score']:.4g}, {e['w_tail']:.4g}")
    for w in report.get("warnings", []):
        add("warning", w)
    width = max(len(name) for name, _ in rows)
    return "".join(f"{name.ljust(width)}  {value}\n" for name, value in rows)
