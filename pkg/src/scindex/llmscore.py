"""Post-processing of repeated LLM quality scores.

LLM scores for one article vary across identical requests, so they are
averaged over repetitions (five or more recommended; fewer is flagged as
low-confidence), optionally normalised by year (additive offsets that
equalise year means) and by field (division by the field mean, giving 1
for a field-average score), and finally converted onto an expert star
scale through a monotone lookup table.

Band boundaries are stated at two-decimal precision with inclusive upper
bounds ("1-2.50", "2.51-2.80", ...): a value between two printed
endpoints, e.g. 2.505, falls in the lower band, since the gap between
2.50 and 2.51 is an artifact of the printed precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .errors import (
    EmptyScores,
    EmptyYear,
    InsufficientData,
    OutOfDomain,
    ZeroFieldMean,
)

LOW_CONFIDENCE_REPETITIONS = 5

_EPS = 1e-9

DEFAULT_SCALE_RESOURCE = "llm_score_scale.json"


@dataclass(frozen=True)
class ScoreBand:
    upper: float  # inclusive at the printed precision
    label: int


@dataclass(frozen=True)
class ScoreScale:
    """Monotone banding from averaged LLM scores to expert star scores.

    ``bands`` are ordered by ascending upper bound with strictly increasing
    labels; the last upper bound closes the domain.  ``grid`` is the
    printed precision of band boundaries.
    """

    bands: tuple[ScoreBand, ...]
    domain: tuple[float, float]
    grid: float = 0.01

    def __post_init__(self):
        if not self.bands:
            raise ValueError("a score scale needs at least one band")
        lo, hi = self.domain
        if not lo < hi:
            raise ValueError("domain must be an increasing interval")
        uppers = [b.upper for b in self.bands]
        labels = [b.label for b in self.bands]
        if uppers != sorted(uppers) or len(set(uppers)) != len(uppers):
            raise ValueError("band upper bounds must be strictly increasing")
        if labels != sorted(labels) or len(set(labels)) != len(labels):
            raise ValueError("band labels must be strictly increasing")
        if abs(uppers[-1] - hi) > _EPS:
            raise ValueError("last band must close the domain")
        if uppers[0] <= lo:
            raise ValueError("first band upper bound must exceed the domain start")

    def band_lower(self, index: int) -> float:
        """Effective lower edge of a band: the previous printed upper plus
        one grid step (the next printed boundary)."""
        if index == 0:
            return self.domain[0]
        return round(self.bands[index - 1].upper + self.grid, 9)

    def lookup(self, value: float) -> int:
        lo, hi = self.domain
        if value < lo - _EPS or value > hi + _EPS:
            raise OutOfDomain(f"value {value} outside domain [{lo}, {hi}]")
        chosen = self.bands[0].label
        for i, band in enumerate(self.bands):
            if value >= self.band_lower(i) - _EPS:
                chosen = band.label
            else:
                break
        return chosen

    def to_dict(self) -> dict:
        return {
            "domain": list(self.domain),
            "grid": self.grid,
            "bands": [{"upper": b.upper, "label": b.label} for b in self.bands],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ScoreScale":
        return cls(
            bands=tuple(
                ScoreBand(float(b["upper"]), int(b["label"])) for b in data["bands"]
            ),
            domain=(float(data["domain"][0]), float(data["domain"][1])),
            grid=float(data.get("grid", 0.01)),
        )

    @classmethod
    def from_json(cls, path: str | Path) -> "ScoreScale":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    @classmethod
    def load_default(cls) -> "ScoreScale":
        """The reference conversion table shipped with the package."""
        text = (
            resources.files("scindex")
            .joinpath("data", DEFAULT_SCALE_RESOURCE)
            .read_text(encoding="utf-8")
        )
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class RepeatedScores:
    """Scores from repeated identical requests for one article."""

    article_id: str
    scores: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.scores)

    @property
    def low_confidence(self) -> bool:
        return self.k < LOW_CONFIDENCE_REPETITIONS


def mean_score(rs: RepeatedScores) -> float:
    """Arithmetic mean of the repeated scores."""
    if not rs.scores:
        raise EmptyScores(f"article {rs.article_id!r} has no scores")
    return sum(rs.scores) / len(rs.scores)


def year_normalize(
    scores_by_year: Mapping[int, Sequence[float]]
) -> tuple[dict[int, list[float]], dict[int, float]]:
    """Shift each year's scores so every year mean equals the grand mean.

    Returns the adjusted scores and the per-year offsets (grand mean minus
    year mean).  Additive shifts preserve within-year rank order exactly.
    """
    if not scores_by_year:
        raise EmptyYear("no scores supplied")
    for year, scores in scores_by_year.items():
        if not scores:
            raise EmptyYear(f"year {year} has no scores")
    total = sum(sum(s) for s in scores_by_year.values())
    count = sum(len(s) for s in scores_by_year.values())
    grand = total / count
    offsets = {
        year: grand - sum(scores) / len(scores)
        for year, scores in scores_by_year.items()
    }
    adjusted = {
        year: [s + offsets[year] for s in scores]
        for year, scores in scores_by_year.items()
    }
    return adjusted, offsets


def field_normalize(score: float, field_mean: float) -> float:
    """Score divided by the field's mean score; 1 marks a field-average
    score.  Positive scaling preserves within-field rank order exactly."""
    if field_mean <= 0:
        raise ZeroFieldMean(f"field mean must be positive, got {field_mean}")
    return score / field_mean


def lookup_convert(value: float, scale: ScoreScale) -> int:
    """Expert star score of the band containing ``value``."""
    return scale.lookup(value)


def calibrate_scale(
    samples: Sequence[tuple[float, int]],
    band_count: int,
    domain: tuple[float, float] | None = None,
    grid: float = 0.01,
) -> ScoreScale:
    """Fit band boundaries from paired (mean LLM score, expert score) data.

    Each boundary between adjacent expert labels is placed on the grid to
    maximise the number of samples on their label's side, ties resolved
    toward the lower boundary; boundaries are kept monotone.  Samples with
    labels outside the ``band_count`` most frequent are ignored.
    """
    if band_count < 2:
        raise ValueError("band_count must be at least 2")
    counts: dict[int, int] = {}
    for _, label in samples:
        counts[label] = counts.get(label, 0) + 1
    if len(counts) < band_count:
        raise InsufficientData(
            f"need {band_count} distinct expert labels, got {len(counts)}"
        )
    keep = sorted(
        sorted(counts), key=lambda lbl: (-counts[lbl], lbl)
    )[:band_count]
    labels = sorted(keep)
    data = sorted((v, lbl) for v, lbl in samples if lbl in set(labels))

    if domain is None:
        values = [v for v, _ in data]
        lo = round(math.floor(min(values) / grid) * grid, 9)
        hi = round(math.ceil(max(values) / grid) * grid, 9)
        domain = (lo, hi)

    n_steps = int(round((domain[1] - domain[0]) / grid))
    grid_points = [round(domain[0] + i * grid, 9) for i in range(n_steps + 1)]

    boundaries: list[float] = []
    previous = domain[0]
    for j in range(len(labels) - 1):
        low_labels = set(labels[: j + 1])
        min_t = round(previous + grid, 9)  # uppers must stay strictly increasing
        best_t, best_score = None, -1
        for t in grid_points:
            if t < min_t - _EPS or t >= domain[1] - _EPS:
                continue
            score = sum(
                1 for v, lbl in data if (v <= t + _EPS) == (lbl in low_labels)
            )
            if score > best_score:  # strict: keeps the lowest optimal cut
                best_t, best_score = t, score
        boundaries.append(min_t if best_t is None else best_t)
        previous = boundaries[-1]

    bands = tuple(
        ScoreBand(upper, label)
        for upper, label in zip(boundaries + [domain[1]], labels)
    )
    return ScoreScale(bands=bands, domain=domain, grid=grid)
