"""Unit-level rollups and indicator-for-human score substitution analysis.

A unit aggregate carries credit-weighted means of normalised citation
scores, percentile shares, grade point average (star scores 1..4 read as
integers 1..4), and funding power.  Funding power weights each article's
star score with 1.0 for 4, 0.25 for 3, and 0 below, summed over the unit.

``score_gain`` replaces a seeded fraction of human scores corpus-wide with
indicator-derived predictions and reports each unit's funding-power change
over repeated draws; ``bias_correlation`` then relates those gains to unit
attributes such as size or human grade point average.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Collection, Mapping, Sequence

import numpy as np

from .corpus import Corpus, UnitMembership
from .credit import CreditKind, CreditScheme, FULL, unit_credit
from .errors import (
    EmptyUnit,
    FractionOutOfRange,
    MissingValue,
    QuotaMismatch,
)
from .validate import CorrelationResult, pearson

DEFAULT_FUNDING_WEIGHTS: Mapping[int, float] = {4: 1.0, 3: 0.25, 2: 0.0, 1: 0.0}

DEFAULT_GAIN_ITERATIONS = 10


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


@dataclass(frozen=True)
class UnitAggregate:
    unit_id: str
    n_articles: int
    mncs: float
    mnlcs: float
    percentile_shares: Mapping[float, float] = field(default_factory=dict)
    gpa: float | None = None
    funding_power_total: float | None = None
    funding_power_mean: float | None = None


@dataclass(frozen=True)
class QuotaAllocation:
    """Predetermined number of articles per star class, highest class
    filled first; ties across a class boundary break by seeded shuffle."""

    class_sizes: Mapping[int, int]
    seed: int = 0

    def __post_init__(self):
        if any(v < 0 for v in self.class_sizes.values()):
            raise ValueError("class sizes must be nonnegative")


def funding_power(score: int | None, weights: Mapping[int, float] | None = None) -> float:
    weights = DEFAULT_FUNDING_WEIGHTS if weights is None else weights
    if score is None:
        return 0.0
    return float(weights.get(score, 0.0))


def unit_aggregate(
    unit: UnitMembership,
    corpus: Corpus,
    ncs_values: Mapping[str, float],
    nlcs_values: Mapping[str, float],
    flags: Mapping[str, Mapping[float, bool]] | None = None,
    credit_scheme: CreditScheme = FULL,
    unit_authors: Collection[str] | None = None,
    funding_weights: Mapping[int, float] | None = None,
) -> UnitAggregate:
    """Credit-weighted aggregate of a unit's member articles.

    Full counting (the default) reduces to plain means.  Position-weighted
    schemes need ``unit_authors``, the author ids belonging to the unit;
    each article then contributes with the credit of the unit's authors.
    Grade point average and funding power need every member to carry a
    star score; they are None when no member does, and partially scored
    units raise :class:`MissingValue`.
    """
    member_ids = sorted(unit.article_ids)
    if not member_ids:
        raise EmptyUnit(f"unit {unit.unit_id!r} has no articles")
    missing = [
        i for i in member_ids if i not in ncs_values or i not in nlcs_values
    ]
    if missing:
        raise MissingValue(
            f"unit {unit.unit_id!r} lacks indicator values for some members",
            ids=missing,
        )

    use_author_credit = (
        credit_scheme.kind is not CreditKind.FULL and unit_authors is not None
    )
    weights_by_id: dict[str, float] = {}
    for article_id in member_ids:
        if use_author_credit:
            w = unit_credit(unit_authors, corpus.get(article_id), credit_scheme)
        else:
            w = 1.0
        weights_by_id[article_id] = w
    mass = sum(weights_by_id.values())
    if mass <= 0.0:
        raise EmptyUnit(
            f"unit {unit.unit_id!r} has no credit mass under the chosen scheme"
        )

    def weighted_mean(values: Mapping[str, float]) -> float:
        return (
            sum(weights_by_id[i] * values[i] for i in member_ids) / mass
        )

    shares: dict[float, float] = {}
    if flags is not None:
        thresholds = sorted({x for i in member_ids for x in flags[i]})
        for x in thresholds:
            shares[x] = 100.0 * (
                sum(weights_by_id[i] * (1.0 if flags[i][x] else 0.0) for i in member_ids)
                / mass
            )

    scores = {i: corpus.get(i).quality_score for i in member_ids}
    scored = {i: s for i, s in scores.items() if s is not None}
    gpa = total = mean = None
    if scored:
        unscored = [i for i in member_ids if i not in scored]
        if unscored:
            raise MissingValue(
                f"unit {unit.unit_id!r} has members without quality scores",
                ids=unscored,
            )
        gpa = weighted_mean({i: float(s) for i, s in scored.items()})
        total = sum(
            weights_by_id[i] * funding_power(s, funding_weights)
            for i, s in scored.items()
        )
        mean = total / mass

    return UnitAggregate(
        unit_id=unit.unit_id,
        n_articles=len(member_ids),
        mncs=weighted_mean(ncs_values),
        mnlcs=weighted_mean(nlcs_values),
        percentile_shares=shares,
        gpa=gpa,
        funding_power_total=total,
        funding_power_mean=mean,
    )


def quota_assign(values: Sequence[float], quota: QuotaAllocation) -> list[int]:
    """Assign star classes to indicator values under fixed class sizes.

    Values are ranked descending and the highest class fills first.  A run
    of tied values crossing a class boundary is ordered by a seeded
    shuffle, so the assignment is deterministic per seed and seed-free for
    all-distinct values.  Returns one class label per input position.
    """
    sizes = dict(quota.class_sizes)
    if sum(sizes.values()) != len(values):
        raise QuotaMismatch(
            f"quota covers {sum(sizes.values())} articles, got {len(values)}"
        )
    labels_desc = sorted(sizes, reverse=True)
    # group positions by value, highest value first
    by_value: dict[float, list[int]] = {}
    for pos, v in enumerate(values):
        by_value.setdefault(float(v), []).append(pos)
    rng = _rng(quota.seed)

    assigned: list[int] = [0] * len(values)
    label_iter = iter(labels_desc)
    current = next(label_iter, None)
    remaining = sizes.get(current, 0) if current is not None else 0
    for value in sorted(by_value, reverse=True):
        block = by_value[value]
        if len(block) > remaining:
            # tie block spans a class boundary: seeded order inside the block
            block = [block[i] for i in rng.permutation(len(block))]
        for pos in block:
            while remaining == 0:
                current = next(label_iter)
                remaining = sizes[current]
            assigned[pos] = current
            remaining -= 1
    return assigned


@dataclass(frozen=True)
class UnitGain:
    unit_id: str
    n_articles: int
    gain_min: float
    gain_mean: float
    gain_max: float


def score_gain(
    units: Sequence[UnitMembership],
    human_scores: Mapping[str, int],
    predicted_scores: Mapping[str, int],
    replace_fraction: float,
    seed: int,
    iterations: int = DEFAULT_GAIN_ITERATIONS,
    funding_weights: Mapping[int, float] | None = None,
    metric: str = "funding",
) -> list[UnitGain]:
    """Per-unit score change from partially substituting predicted scores.

    Each iteration replaces a seeded ``replace_fraction`` of all articles
    (chosen corpus-wide, so shared articles stay consistent across units)
    with predicted scores and re-averages per unit.  The gain is the mixed
    minus the all-human per-article mean of funding power (or of the raw
    score with ``metric="gpa"``).  Iteration i draws from a generator
    seeded by (seed, i), so results do not depend on scheduling.
    """
    if not 0.0 < replace_fraction <= 1.0:
        raise FractionOutOfRange(
            f"replace_fraction must be in (0, 1], got {replace_fraction}"
        )
    if metric not in ("funding", "gpa"):
        raise ValueError("metric must be 'funding' or 'gpa'")
    all_ids = sorted({i for u in units for i in u.article_ids})
    missing = [
        i for i in all_ids if i not in human_scores or i not in predicted_scores
    ]
    if missing:
        raise MissingValue("score sets do not cover all articles", ids=missing)

    def per_article(score: int) -> float:
        if metric == "gpa":
            return float(score)
        return funding_power(score, funding_weights)

    def unit_mean(scores: Mapping[str, int], unit: UnitMembership) -> float:
        members = unit.article_ids
        return sum(per_article(scores[i]) for i in members) / len(members)

    base = {u.unit_id: unit_mean(human_scores, u) for u in units}
    n_replace = int(replace_fraction * len(all_ids) + 0.5)
    gains: dict[str, list[float]] = {u.unit_id: [] for u in units}
    for iteration in range(iterations):
        rng = _rng(seed, iteration)
        chosen = rng.choice(len(all_ids), size=n_replace, replace=False)
        mixed = dict(human_scores)
        for idx in chosen:
            article_id = all_ids[int(idx)]
            mixed[article_id] = predicted_scores[article_id]
        for u in units:
            gains[u.unit_id].append(unit_mean(mixed, u) - base[u.unit_id])

    out = []
    for u in units:
        series = gains[u.unit_id]
        out.append(
            UnitGain(
                unit_id=u.unit_id,
                n_articles=len(u.article_ids),
                gain_min=min(series),
                gain_mean=sum(series) / len(series),
                gain_max=max(series),
            )
        )
    return out


def bias_correlation(
    unit_gains: Mapping[str, float], unit_attribute: Mapping[str, float]
) -> CorrelationResult:
    """Pearson correlation between a unit attribute (human grade point
    average, size, ...) and per-unit gains."""
    keys = sorted(unit_gains)
    missing = [k for k in keys if k not in unit_attribute]
    if missing:
        raise MissingValue("attribute missing for some units", ids=missing)
    x = [unit_attribute[k] for k in keys]
    y = [unit_gains[k] for k in keys]
    return pearson(x, y)
