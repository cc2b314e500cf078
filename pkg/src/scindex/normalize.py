"""Field-and-year reference statistics and normalised citation scores.

A reference group is every corpus article of the configured document types
sharing one field code and publication year; each article is part of its
own group.  Two per-article scores are computed against group means:

* normalised citation score  -- citations divided by the group mean count;
  1 marks the world-average citation rate for the field and year.
* normalised log citation score -- ln(1 + citations) divided by the group
  mean of ln(1 + citations), which corrects the heavy right skew of
  citation counts.

Natural logarithms throughout.  Multi-field articles divide by the
arithmetic (default) or harmonic mean of the per-field group means; the
log-score variant mirrors the same option set even though only the
arithmetic mean is conventional for it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .corpus import Article, ClassificationScheme, Corpus, DocType, resolve_fields
from .errors import NormalizationUndefined

DEFAULT_REFERENCE_DOC_TYPES = frozenset({DocType.ARTICLE, DocType.REVIEW})

MULTI_FIELD_MODES = ("arithmetic", "harmonic")


@dataclass(frozen=True)
class WindowSpec:
    """Citation window: keep citations at most ``window_years`` after
    publication (inclusive); None means unlimited."""

    window_years: int | None = None

    def __post_init__(self):
        if self.window_years is not None and self.window_years < 1:
            raise ValueError("bounded windows need window_years >= 1")

    @property
    def unlimited(self) -> bool:
        return self.window_years is None


UNLIMITED_WINDOW = WindowSpec(None)


@dataclass(frozen=True)
class FieldYearStats:
    """Reference statistics for one (field, year) group."""

    field: str
    year: int
    n_articles: int
    mean_citations: float
    mean_log_citations: float


def windowed_count(
    article: Article,
    corpus: Corpus,
    window: WindowSpec = UNLIMITED_WINDOW,
    include_self_citations: bool = True,
) -> int:
    """Distinct citing documents within the window (inclusive boundary)."""
    return corpus.citation_count(
        article.id, window.window_years, include_self_citations
    )


def build_stats(
    corpus: Corpus,
    scheme: ClassificationScheme | None = None,
    window: WindowSpec = UNLIMITED_WINDOW,
    doc_types: frozenset[DocType] = DEFAULT_REFERENCE_DOC_TYPES,
    include_self_citations: bool = True,
) -> dict[tuple[str, int], FieldYearStats]:
    """Reference statistics for every populated (field, year) group.

    An article assigned to k fields contributes to all k groups.  Results
    are independent of corpus row order and of any internal parallelism.
    """
    sums: dict[tuple[str, int], list[float]] = {}
    for article in corpus:
        if article.doc_type not in doc_types:
            continue
        fields = resolve_fields(article, scheme)
        c = corpus.citation_count(
            article.id, window.window_years, include_self_citations
        )
        for code in fields:
            acc = sums.setdefault((code, article.year), [0, 0.0, 0.0])
            acc[0] += 1
            acc[1] += c
            acc[2] += math.log1p(c)
    return {
        key: FieldYearStats(key[0], key[1], int(n), total / n, log_total / n)
        for key, (n, total, log_total) in sorted(sums.items())
    }


def _group_means(
    fields: Iterable[str],
    year: int,
    stats: Mapping[tuple[str, int], FieldYearStats],
    attr: str,
) -> list[float]:
    means = []
    for code in fields:
        entry = stats.get((code, year))
        if entry is None:
            raise NormalizationUndefined(
                f"no reference statistics for field {code!r}, year {year}"
            )
        means.append(getattr(entry, attr))
    return means


def _combine(means: list[float], mode: str) -> float:
    if mode not in MULTI_FIELD_MODES:
        raise ValueError(f"multi_field_mode must be one of {MULTI_FIELD_MODES}")
    if mode == "harmonic":
        if any(m == 0.0 for m in means):
            return 0.0
        return len(means) / sum(1.0 / m for m in means)
    return sum(means) / len(means)


def ncs(
    article: Article,
    stats: Mapping[tuple[str, int], FieldYearStats],
    multi_field_mode: str = "arithmetic",
    *,
    citations: int | None = None,
    fields: Iterable[str] | None = None,
) -> float:
    """Citations divided by the (combined) reference-group mean.

    ``citations``/``fields`` override the article's stored values, e.g. for
    windowed counts or scheme-resolved fields.  An uncited article in a
    wholly uncited group scores 1.0 (it equals its degenerate reference).
    """
    c = article.citations if citations is None else citations
    c = c or 0
    codes = tuple(fields) if fields is not None else article.fields
    if not codes:
        raise NormalizationUndefined(f"article {article.id!r} has no fields")
    denom = _combine(_group_means(codes, article.year, stats, "mean_citations"),
                     multi_field_mode)
    if denom > 0.0:
        return c / denom
    if c == 0:
        return 1.0
    raise NormalizationUndefined(
        f"article {article.id!r} is cited but its reference mean is 0"
    )


def nlcs(
    article: Article,
    stats: Mapping[tuple[str, int], FieldYearStats],
    multi_field_mode: str = "arithmetic",
    *,
    citations: int | None = None,
    fields: Iterable[str] | None = None,
) -> float:
    """ln(1 + citations) divided by the (combined) group mean of the logs.

    Zero for uncited articles whenever the group mean is positive; 1.0 when
    numerator and denominator are both zero.
    """
    c = article.citations if citations is None else citations
    c = c or 0
    codes = tuple(fields) if fields is not None else article.fields
    if not codes:
        raise NormalizationUndefined(f"article {article.id!r} has no fields")
    num = math.log1p(c)
    denom = _combine(
        _group_means(codes, article.year, stats, "mean_log_citations"),
        multi_field_mode,
    )
    if denom > 0.0:
        return num / denom
    if num == 0.0:
        return 1.0
    raise NormalizationUndefined(
        f"article {article.id!r} is cited but its reference log-mean is 0"
    )


def stats_rows(
    stats: Mapping[tuple[str, int], FieldYearStats]
) -> list[tuple[str, int, int, float, float]]:
    """Rows for CSV export: field,year,n,mean_citations,mean_log_citations."""
    return [
        (s.field, s.year, s.n_articles, s.mean_citations, s.mean_log_citations)
        for _, s in sorted(stats.items())
    ]
