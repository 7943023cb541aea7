"""Score file parsing, validation and per-group partitioning."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import DataError

GENUINE = "genuine"
IMPOSTOR = "impostor"
KINDS = (GENUINE, IMPOSTOR)
HEADER = ("score", "label", "group")

DEFAULT_MIN_PER_CELL = 50


@dataclass(frozen=True)
class ScoreRecord:
    score: float
    kind: str
    group: str

    def __post_init__(self):
        if not math.isfinite(self.score) or not 0.0 <= self.score <= 1.0:
            raise DataError(f"score {self.score!r} outside [0, 1]")
        if self.kind not in KINDS:
            raise DataError(f"unknown label {self.kind!r}")
        if not self.group:
            raise DataError("empty group identifier")


@dataclass(frozen=True)
class GroupScores:
    group: str
    genuine: np.ndarray
    impostor: np.ndarray

    def __post_init__(self):
        for kind in KINDS:
            arr = np.asarray(getattr(self, kind), dtype=float)
            arr.setflags(write=False)
            if arr.ndim != 1:
                raise DataError(f"{self.group}/{kind}: scores must be one-dimensional")
            if arr.size and (not np.all(np.isfinite(arr)) or arr.min() < 0.0 or arr.max() > 1.0):
                raise DataError(f"{self.group}/{kind}: scores outside [0, 1]")
            object.__setattr__(self, kind, arr)

    def scores(self, kind: str) -> np.ndarray:
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        return getattr(self, kind)

    def combined(self) -> np.ndarray:
        return np.concatenate([self.genuine, self.impostor])


@dataclass(frozen=True)
class ScoreDataset:
    """Disjoint demographic groups, each with genuine and impostor scores."""

    groups: tuple[GroupScores, ...]

    def __post_init__(self):
        groups = tuple(self.groups)
        names = [g.group for g in groups]
        if len(set(names)) != len(names):
            raise DataError("group identifiers must be unique")
        if len(groups) < 2:
            raise DataError(f"K must be ≥ 2 (got {len(groups)} group(s))")
        object.__setattr__(self, "groups", groups)

    @property
    def K(self) -> int:
        return len(self.groups)

    @property
    def names(self) -> list[str]:
        return [g.group for g in self.groups]

    def __getitem__(self, name: str) -> GroupScores:
        for g in self.groups:
            if g.group == name:
                return g
        raise KeyError(name)

    def pooled(self, kind: str) -> np.ndarray:
        return np.concatenate([g.scores(kind) for g in self.groups])

    def records(self) -> Iterable[ScoreRecord]:
        for g in self.groups:
            for kind in KINDS:
                for s in g.scores(kind):
                    yield ScoreRecord(float(s), kind, g.group)

    @classmethod
    def from_mapping(cls, data: dict) -> "ScoreDataset":
        """Build from ``{group: {"genuine": [...], "impostor": [...]}}``."""
        return cls(tuple(
            GroupScores(name, np.asarray(cells.get(GENUINE, []), dtype=float),
                        np.asarray(cells.get(IMPOSTOR, []), dtype=float))
            for name, cells in data.items()
        ))


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    std_dev: float
    count: int
    min: float
    max: float


def summary_stats(scores: Sequence[float]) -> SummaryStats:
    """Mean and population (1/n) standard deviation of ``scores``."""
    arr = np.asarray(scores, dtype=float)
    if arr.size == 0:
        raise DataError("summary statistics of an empty sequence")
    lo, hi = float(arr.min()), float(arr.max())
    # rounding in the mean can step just outside [min, max] for constant input
    mean = min(max(float(arr.mean()), lo), hi)
    std = 0.0 if lo == hi else float(arr.std())
    return SummaryStats(mean, std, int(arr.size), lo, hi)


def parse_score_csv(stream: IO[str] | IO[bytes] | str) -> ScoreDataset:
    """Read a ``score,label,group`` CSV into a :class:`ScoreDataset`.

    ``stream`` may be a text or binary file object, or a path. Errors carry
    the 1-based line number of the offending row.
    """
    if isinstance(stream, str):
        with open(stream, encoding="utf-8", newline="") as fh:
            return parse_score_csv(fh)
    text = stream.read()
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    reader = csv.reader(io.StringIO(text, newline=""))

    header = next(reader, None)
    if header is None or tuple(c.strip().lower() for c in header) != HEADER:
        raise DataError(f"line 1: expected header 'score,label,group', got {header!r}")

    cells: dict[str, dict[str, list[float]]] = {}
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise DataError(f"line {line}: expected 3 columns, got {len(row)}")
        raw_score, label, group = (c.strip() for c in row)
        try:
            score = float(raw_score)
        except ValueError:
            raise DataError(f"line {line}: cannot parse score {raw_score!r}") from None
        if not math.isfinite(score) or not 0.0 <= score <= 1.0:
            raise DataError(f"line {line}: score {raw_score} outside [0, 1]")
        kind = label.lower()
        if kind not in KINDS:
            raise DataError(f"line {line}: unknown label {label!r}")
        if not group:
            raise DataError(f"line {line}: empty group")
        cell = cells.setdefault(group, {GENUINE: [], IMPOSTOR: []})
        cell[kind].append(score)

    if not cells:
        raise DataError("no records")
    if len(cells) < 2:
        raise DataError(f"K must be ≥ 2 (found only group {next(iter(cells))!r})")
    return ScoreDataset.from_mapping(cells)


def write_score_csv(ds: ScoreDataset, stream: IO[str]) -> None:
    """Emit ``ds`` in the canonical CSV form (lowercase labels, LF endings).

    Scores are written with ``repr`` so a re-parse yields identical floats.
    """
    stream.write(",".join(HEADER) + "\n")
    for g in ds.groups:
        for kind in KINDS:
            for s in g.scores(kind):
                stream.write(f"{float(s)!r},{kind},{g.group}\n")


def dataset_to_csv(ds: ScoreDataset) -> str:
    buf = io.StringIO()
    write_score_csv(ds, buf)
    return buf.getvalue()


@dataclass
class ValidationSummary:
    counts: dict[str, dict[str, int]]
    min_per_cell: int
    flags: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.flags

    @property
    def total(self) -> int:
        return sum(n for cell in self.counts.values() for n in cell.values())


def validate_dataset(ds: ScoreDataset, min_per_cell: int = DEFAULT_MIN_PER_CELL) -> ValidationSummary:
    counts = {g.group: {k: int(g.scores(k).size) for k in KINDS} for g in ds.groups}
    flags = [(name, kind) for name, cell in counts.items() for kind, n in cell.items()
             if n < min_per_cell]
    return ValidationSummary(counts, min_per_cell, flags)
