"""Per-article bibliometric feature vectors for external ML harnesses.

Ten features per article: the normalised log citation score; log-transformed
author/institution/country counts; the first author's log output and mean
normalised log citation score; the best such score over all authors; page
count (field-median imputed when missing); abstract readability
(Flesch-Kincaid grade level); and the journal's mean normalised log citation
score.  Log transforms are ln(1 + raw count) throughout.
"""

from __future__ import annotations

import math
import re
import statistics
from dataclasses import dataclass
from typing import Mapping

from .corpus import Article, ClassificationScheme, Corpus, resolve_fields
from .errors import EmptyJournalYear, EmptyText, UnknownAuthor
from .normalize import (
    DEFAULT_REFERENCE_DOC_TYPES,
    FieldYearStats,
    UNLIMITED_WINDOW,
    WindowSpec,
    nlcs,
)

FEATURE_NAMES = (
    "nlcs",
    "log_n_authors",
    "log_n_institutions",
    "log_n_countries",
    "first_author_log_output",
    "first_author_mnlcs",
    "max_author_mnlcs",
    "n_pages",
    "abstract_readability",
    "journal_mnlcs",
)

PAGES_COLUMN = "pages"


@dataclass(frozen=True)
class FeatureVector:
    nlcs: float
    log_n_authors: float
    log_n_institutions: float
    log_n_countries: float
    first_author_log_output: float
    first_author_mnlcs: float
    max_author_mnlcs: float
    n_pages: float
    abstract_readability: float
    journal_mnlcs: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FEATURE_NAMES}


# --- readability -------------------------------------------------------------

_HEADING_RE = re.compile(
    r"\b(background|objectives?|aims?|methods?|results?|conclusions?|purpose|"
    r"introduction|design|setting|discussion|findings)\s*:\s*",
    re.IGNORECASE,
)
_COPYRIGHT_LINE_RE = re.compile(
    r"^.*(©|\(c\)\s*\d{4}|copyright|all rights reserved).*$",
    re.IGNORECASE | re.MULTILINE,
)
_WORD_RE = re.compile(r"[A-Za-z0-9']+")
_VOWEL_GROUP_RE = re.compile(r"[aeiouy]+", re.IGNORECASE)


def clean_abstract(text: str) -> str:
    """Minimal cleaner: drop copyright lines and structured-abstract
    headings.  Intentionally swappable; pass pre-cleaned text to skip it."""
    text = _COPYRIGHT_LINE_RE.sub("", text)
    return _HEADING_RE.sub("", text)


def count_syllables(word: str) -> int:
    """Vowel-group heuristic: contiguous [aeiouy] runs, minus a trailing
    silent e, with a floor of one syllable per word."""
    groups = len(_VOWEL_GROUP_RE.findall(word))
    if word.lower().endswith("e") and groups > 1:
        groups -= 1
    return max(1, groups)


def readability(text: str, clean: bool = True) -> float:
    """Flesch-Kincaid grade level:
    0.39*(words/sentences) + 11.8*(syllables/words) - 15.59.
    """
    if clean:
        text = clean_abstract(text)
    segments = re.split(r"[.!?]+", text)
    sentences = [s for s in segments if _WORD_RE.search(s)]
    words = _WORD_RE.findall(text)
    if not words:
        raise EmptyText("no words left after cleaning")
    n_sentences = max(1, len(sentences))
    n_words = len(words)
    n_syllables = sum(count_syllables(w) for w in words)
    return 0.39 * (n_words / n_sentences) + 11.8 * (n_syllables / n_words) - 15.59


# --- corpus-level feature context --------------------------------------------


class FeatureBuilder:
    """Precomputes the per-article scores and indexes the features need.

    Pure given an immutable corpus and its reference statistics; building
    vectors afterwards is independent of corpus row order.
    """

    def __init__(
        self,
        corpus: Corpus,
        stats: Mapping[tuple[str, int], FieldYearStats],
        scheme: ClassificationScheme | None = None,
        multi_field_mode: str = "arithmetic",
        doc_types=DEFAULT_REFERENCE_DOC_TYPES,
        window: WindowSpec = UNLIMITED_WINDOW,
        include_self_citations: bool = True,
        reference_year: int | None = None,
    ):
        self.corpus = corpus
        self.stats = stats
        self.scheme = scheme
        self.multi_field_mode = multi_field_mode
        self.doc_types = doc_types
        self.window = window
        self.include_self_citations = include_self_citations
        self.reference_year = (
            reference_year if reference_year is not None else (corpus.max_year or 0)
        )

        self._nlcs: dict[str, float] = {}
        self._fields: dict[str, tuple[str, ...]] = {}
        self._by_author: dict[str, list[str]] = {}
        self._by_journal_year: dict[tuple[str, int], list[str]] = {}
        self._pages_by_field: dict[str, list[float]] = {}
        all_pages: list[float] = []
        for article in corpus:
            if article.doc_type not in doc_types:
                continue
            fields = resolve_fields(article, scheme)
            self._fields[article.id] = fields
            c = corpus.citation_count(
                article.id, window.window_years, include_self_citations
            )
            self._nlcs[article.id] = nlcs(
                article, stats, multi_field_mode, citations=c, fields=fields
            )
            for author in article.authors:
                self._by_author.setdefault(author, []).append(article.id)
            self._by_journal_year.setdefault(
                (article.journal_id, article.year), []
            ).append(article.id)
            pages = article.columns.get(PAGES_COLUMN)
            if pages is not None:
                all_pages.append(float(pages))
                for code in fields:
                    self._pages_by_field.setdefault(code, []).append(float(pages))
        self._corpus_median_pages = (
            statistics.median(all_pages) if all_pages else 0.0
        )

    def article_nlcs(self, article_id: str) -> float:
        return self._nlcs[article_id]

    def author_output(self, author_id: str) -> int:
        return len(self._by_author.get(author_id, ()))

    def author_mnlcs(self, author_id: str) -> float:
        ids = self._by_author.get(author_id)
        if not ids:
            raise UnknownAuthor(f"author {author_id!r} has no corpus articles")
        return sum(self._nlcs[i] for i in ids) / len(ids)

    def journal_mnlcs(self, article: Article) -> float:
        """Journal mean score: same-year articles once the article is three
        or more years old, otherwise pooled over a three-year window."""
        age = self.reference_year - article.year
        if age >= 3:
            years = (article.year,)
        else:
            years = (article.year - 2, article.year - 1, article.year)
        ids: list[str] = []
        for y in years:
            ids.extend(self._by_journal_year.get((article.journal_id, y), ()))
        if not ids:
            raise EmptyJournalYear(
                f"journal {article.journal_id!r} has no qualifying articles "
                f"in {list(years)}"
            )
        return sum(self._nlcs[i] for i in ids) / len(ids)

    def pages(self, article: Article) -> float:
        value = article.columns.get(PAGES_COLUMN)
        if value is not None:
            return float(value)
        pooled: list[float] = []
        for code in self._fields.get(article.id, ()):
            pooled.extend(self._pages_by_field.get(code, ()))
        if pooled:
            return statistics.median(pooled)
        return self._corpus_median_pages

    def vector(self, article: Article) -> FeatureVector:
        if article.id not in self._nlcs:
            raise KeyError(
                f"article {article.id!r} is not a qualifying corpus article"
            )
        first = article.authors[0] if article.authors else None
        if first is None:
            raise UnknownAuthor(f"article {article.id!r} has no authors")
        per_author = [self.author_mnlcs(a) for a in article.authors]
        if article.title_abstract_text is None:
            raise EmptyText(f"article {article.id!r} has no abstract text")
        return FeatureVector(
            nlcs=self._nlcs[article.id],
            log_n_authors=math.log1p(len(article.authors)),
            log_n_institutions=math.log1p(len(article.institutions)),
            log_n_countries=math.log1p(len(article.countries)),
            first_author_log_output=math.log1p(self.author_output(first)),
            first_author_mnlcs=self.author_mnlcs(first),
            max_author_mnlcs=max(per_author),
            n_pages=self.pages(article),
            abstract_readability=readability(article.title_abstract_text),
            journal_mnlcs=self.journal_mnlcs(article),
        )


def author_mnlcs(
    author_id: str,
    corpus: Corpus,
    stats: Mapping[tuple[str, int], FieldYearStats],
    scheme: ClassificationScheme | None = None,
    multi_field_mode: str = "arithmetic",
) -> float:
    """Mean normalised log citation score over an author's corpus articles."""
    builder = FeatureBuilder(corpus, stats, scheme, multi_field_mode)
    return builder.author_mnlcs(author_id)


def feature_vector(
    article: Article,
    corpus: Corpus,
    stats: Mapping[tuple[str, int], FieldYearStats],
    scheme: ClassificationScheme | None = None,
    reference_year: int | None = None,
) -> FeatureVector:
    """All ten features for one article.  For bulk use build a
    :class:`FeatureBuilder` once and call :meth:`FeatureBuilder.vector`."""
    builder = FeatureBuilder(
        corpus, stats, scheme, reference_year=reference_year
    )
    return builder.vector(article)
