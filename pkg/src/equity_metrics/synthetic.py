"""Seeded Beta-score datasets with controlled, localized bias.

Scenarios:

* ``FAIR``: every group drawn from the baseline distributions.
* ``BG``: the biased group's genuine scores get a heavier lower tail.
* ``BI``: the biased group's impostor scores get a heavier upper tail.
* ``BC``: the biased group's distributions move in the center while the
  tails that decide error rates stay roughly where they were.

A cell distribution is a Beta mixture, given as ``((weight, alpha, beta), ...)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ingest import GENUINE, IMPOSTOR, GroupScores, ScoreDataset

SCENARIOS = ("FAIR", "BG", "BI", "BC")

Mixture = tuple[tuple[float, float, float], ...]

# a well-separated "high-performance" system: FNMR at FMR 3e-4 is ~1e-8
BASELINE_GENUINE: Mixture = ((1.0, 120.0, 30.0),)
BASELINE_IMPOSTOR: Mixture = ((1.0, 30.0, 120.0),)
# 8% of the biased cell drawn from a broad component: long tail, center kept
BG_GENUINE: Mixture = ((0.92, 120.0, 30.0), (0.08, 3.0, 2.0))
BI_IMPOSTOR: Mixture = ((0.92, 30.0, 120.0), (0.08, 2.0, 3.0))
# means moved inward (impostor +0.06, genuine -0.03) with the concentration
# solved so that mass beyond the baseline 3e-4 quantile is unchanged
BC_GENUINE: Mixture = ((1.0, 207.0, 62.0),)
BC_IMPOSTOR: Mixture = ((1.0, 154.0, 439.0),)

_KIND_CODE = {GENUINE: 0, IMPOSTOR: 1}


def _as_mixture(m) -> Mixture:
    m = tuple(m)
    if len(m) == 2 and all(np.isscalar(x) for x in m):
        m = ((1.0, m[0], m[1]),)
    return tuple((float(w), float(a), float(b)) for w, a, b in m)


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: str = "FAIR"
    n_groups: int = 4
    biased_group_index: int = 0
    samples_per_cell: int = 100_000
    seed: int = 0
    baseline_genuine: Mixture = BASELINE_GENUINE
    baseline_impostor: Mixture = BASELINE_IMPOSTOR
    biased_genuine: Mixture | None = None
    biased_impostor: Mixture | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        if self.n_groups < 2:
            raise ValueError("need at least 2 groups")
        if not 0 <= self.biased_group_index < self.n_groups:
            raise ValueError("biased_group_index out of range")
        if self.samples_per_cell < 1:
            raise ValueError("samples_per_cell must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        defaults = {
            "biased_genuine": BG_GENUINE if self.scenario == "BG" else BC_GENUINE,
            "biased_impostor": BI_IMPOSTOR if self.scenario == "BI" else BC_IMPOSTOR,
        }
        for name in ("baseline_genuine", "baseline_impostor", "biased_genuine", "biased_impostor"):
            value = getattr(self, name)
            mix = _as_mixture(defaults[name] if value is None else value)
            if not mix or any(w <= 0 or a <= 0 or b <= 0 for w, a, b in mix):
                raise ValueError(f"{name}: weights and shape parameters must be positive")
            object.__setattr__(self, name, mix)

    def cell_mixture(self, group_index: int, kind: str) -> Mixture:
        biased = group_index == self.biased_group_index
        if kind == GENUINE:
            if biased and self.scenario in ("BG", "BC"):
                return self.biased_genuine
            return self.baseline_genuine
        if biased and self.scenario in ("BI", "BC"):
            return self.biased_impostor
        return self.baseline_impostor


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def beta_sample(alpha: float, beta: float, n: int, seed) -> np.ndarray:
    if alpha <= 0 or beta <= 0:
        raise ValueError("Beta shape parameters must be positive")
    if n < 1:
        raise ValueError("n must be at least 1")
    return _rng(seed).beta(alpha, beta, size=n)


def mixture_sample(mixture: Mixture, n: int, seed) -> np.ndarray:
    mix = _as_mixture(mixture)
    rng = _rng(seed)
    weights = np.array([w for w, _, _ in mix])
    component = rng.choice(len(mix), size=n, p=weights / weights.sum())
    out = np.empty(n)
    for i, (_, a, b) in enumerate(mix):
        sel = component == i
        out[sel] = rng.beta(a, b, size=int(sel.sum()))
    return out


def group_name(index: int) -> str:
    return f"G{index}"


def generate_scenario(spec: ScenarioSpec) -> ScoreDataset:
    groups = []
    for i in range(spec.n_groups):
        cells = {}
        for kind in (GENUINE, IMPOSTOR):
            # one independent stream per (seed, group, kind)
            cell_seed = [spec.seed, i, _KIND_CODE[kind]]
            cells[kind] = mixture_sample(spec.cell_mixture(i, kind), spec.samples_per_cell, cell_seed)
        groups.append(GroupScores(group_name(i), cells[GENUINE], cells[IMPOSTOR]))
    return ScoreDataset(tuple(groups))


def affine_normal_sample(loc: float, scale: float, n: int, seed) -> np.ndarray:
    """Normal draws ``loc + scale*z``; values outside [0, 1] are redrawn."""
    return _affine(lambda rng, m: rng.standard_normal(m), loc, scale, n, seed)


def affine_student_t_sample(df: float, loc: float, scale: float, n: int, seed) -> np.ndarray:
    """Student-t draws standardized to unit variance, then ``loc + scale*z``.

    ``df`` must exceed 2. Values outside [0, 1] are redrawn.
    """
    if df <= 2:
        raise ValueError("df must exceed 2 for a finite variance")
    unit = np.sqrt((df - 2.0) / df)
    return _affine(lambda rng, m: rng.standard_t(df, m) * unit, loc, scale, n, seed)


def _affine(draw, loc, scale, n, seed) -> np.ndarray:
    rng = _rng(seed)
    out = np.empty(0)
    while out.size < n:
        x = loc + scale * draw(rng, n)
        out = np.concatenate([out, x[(x >= 0.0) & (x <= 1.0)]])
    return out[:n]
