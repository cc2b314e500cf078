"""Percentile membership, journal indicators, citation-graph scores, h-index.

Percentile rule: an article is in the top X% of its group when the
proportion of group members with strictly more citations is below X/100,
so tied articles share membership.  Comparisons use exact rational
arithmetic, making threshold boundaries independent of float rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import ClassificationScheme, Corpus, DocType, resolve_fields
from .errors import EdgesUnavailable, EmptyJournalYear, EmptyUnit, NoCitableItems
from .normalize import (
    DEFAULT_REFERENCE_DOC_TYPES,
    FieldYearStats,
    UNLIMITED_WINDOW,
    WindowSpec,
    ncs,
    nlcs,
)

CITABLE_DOC_TYPES = frozenset({DocType.ARTICLE, DocType.REVIEW})

# Combines output volume with impact; unsuitable for comparing people with
# different career lengths or fields.  Attached to every h-index report.
H_INDEX_CAVEAT = (
    "h-index conflates output volume with citation impact and is not "
    "recommended for comparisons between people"
)


@dataclass(frozen=True)
class PercentileSpec:
    """Ascending top-X% thresholds, each in (0, 100]."""

    thresholds: tuple[float, ...]

    def __post_init__(self):
        if not self.thresholds:
            raise ValueError("at least one percentile threshold required")
        last = None
        for x in self.thresholds:
            if not (0.0 < x <= 100.0):
                raise ValueError(f"threshold {x} outside (0, 100]")
            if last is not None and x <= last:
                raise ValueError("thresholds must be strictly ascending")
            last = x

    def fractions(self) -> tuple[Fraction, ...]:
        # str() round-trips the intended decimal value, not its float bits.
        return tuple(Fraction(str(x)) / 100 for x in self.thresholds)


@dataclass(frozen=True)
class JournalImpactResult:
    journal_id: str
    indicator: str
    value: float
    year: int
    window_years: int


def percentile_flags(
    group: Sequence[tuple[str, int]], spec: PercentileSpec
) -> dict[str, dict[float, bool]]:
    """Top-X% membership for every article in one reference group.

    ``group`` pairs article ids with citation counts.  Membership at X
    implies membership at every larger threshold.
    """
    if not group:
        raise EmptyUnit("percentile group is empty")
    n = len(group)
    counts = sorted(c for _, c in group)
    cuts = spec.fractions()
    flags: dict[str, dict[float, bool]] = {}
    for article_id, c in group:
        # members with strictly greater count, via right bisection
        lo, hi = 0, n
        while lo < hi:
            mid = (lo + hi) // 2
            if counts[mid] <= c:
                lo = mid + 1
            else:
                hi = mid
        greater = n - lo
        share = Fraction(greater, n)
        flags[article_id] = {
            x: share < cut for x, cut in zip(spec.thresholds, cuts)
        }
    return flags


def percentile_share(
    unit_article_ids: Iterable[str],
    flags: Mapping[str, Mapping[float, bool]],
    threshold: float,
) -> float:
    """Percentage of a unit's articles flagged at the given threshold."""
    ids = list(unit_article_ids)
    if not ids:
        raise EmptyUnit("cannot compute a percentile share for an empty unit")
    flagged = sum(1 for i in ids if flags[i][threshold])
    return 100.0 * flagged / len(ids)


def jif(
    corpus: Corpus,
    journal_id: str,
    year: int,
    window_years: int = 2,
    include_self_citations: bool = True,
) -> float:
    """Windowed journal impact: year-``year`` citations to the journal's
    items from the previous ``window_years`` years, divided by its citable
    items (articles and reviews) in those years.

    The numerator deliberately counts citations to *all* document types
    while the denominator counts only citable items, mirroring the
    published formula's numerator/denominator mismatch.  Self-citations
    (citing document in the same journal, when known) are included unless
    switched off.
    """
    if not corpus.has_edges:
        raise EdgesUnavailable("journal impact needs ingested citation edges")
    lo, hi = year - window_years, year - 1
    items = {
        a.id: a
        for a in corpus
        if a.journal_id == journal_id and lo <= a.year <= hi
    }
    n_citable = sum(1 for a in items.values() if a.doc_type in CITABLE_DOC_TYPES)
    if n_citable == 0:
        raise NoCitableItems(
            f"journal {journal_id!r} has no citable items in {lo}..{hi}"
        )
    numerator = 0
    for e in corpus.edges:
        if e.cited_id not in items or e.citing_year != year:
            continue
        if not include_self_citations:
            citing = corpus.get(e.citing_id) if e.citing_id in corpus else None
            if citing is not None and citing.journal_id == journal_id:
                continue
        numerator += 1
    return numerator / n_citable


def _journal_mean(
    corpus: Corpus,
    journal_id: str,
    years: Iterable[int],
    stats: Mapping[tuple[str, int], FieldYearStats],
    score,
    scheme: ClassificationScheme | None,
    multi_field_mode: str,
    doc_types: frozenset[DocType],
    window: WindowSpec,
    include_self_citations: bool,
) -> float:
    year_set = set(years)
    values = []
    for article in corpus:
        if article.journal_id != journal_id or article.year not in year_set:
            continue
        if article.doc_type not in doc_types:
            continue
        fields = resolve_fields(article, scheme)
        c = corpus.citation_count(
            article.id, window.window_years, include_self_citations
        )
        values.append(
            score(article, stats, multi_field_mode, citations=c, fields=fields)
        )
    if not values:
        raise EmptyJournalYear(
            f"journal {journal_id!r} has no qualifying articles in {sorted(year_set)}"
        )
    return sum(values) / len(values)


def jmnlcs(
    corpus: Corpus,
    journal_id: str,
    years: Iterable[int],
    stats: Mapping[tuple[str, int], FieldYearStats],
    scheme: ClassificationScheme | None = None,
    multi_field_mode: str = "arithmetic",
    doc_types: frozenset[DocType] = DEFAULT_REFERENCE_DOC_TYPES,
    window: WindowSpec = UNLIMITED_WINDOW,
    include_self_citations: bool = True,
) -> float:
    """Mean normalised log citation score of a journal's articles."""
    return _journal_mean(
        corpus, journal_id, years, stats, nlcs, scheme, multi_field_mode,
        doc_types, window, include_self_citations,
    )


def journal_mncs(
    corpus: Corpus,
    journal_id: str,
    years: Iterable[int],
    stats: Mapping[tuple[str, int], FieldYearStats],
    scheme: ClassificationScheme | None = None,
    multi_field_mode: str = "arithmetic",
    doc_types: frozenset[DocType] = DEFAULT_REFERENCE_DOC_TYPES,
    window: WindowSpec = UNLIMITED_WINDOW,
    include_self_citations: bool = True,
) -> float:
    """Mean normalised citation score of a journal's articles."""
    return _journal_mean(
        corpus, journal_id, years, stats, ncs, scheme, multi_field_mode,
        doc_types, window, include_self_citations,
    )


# --- citation-graph scores ---------------------------------------------------


@dataclass
class PageRankResult:
    scores: dict[str, float]
    iterations: int
    converged: bool
    residual: float = field(default=0.0)


def pagerank(
    edges: Mapping[tuple[str, str], float] | Iterable[tuple[str, str]],
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 1000,
    nodes: Iterable[str] = (),
) -> PageRankResult:
    """Power iteration with uniform teleport and uniform dangling-mass
    redistribution; scores sum to 1.

    ``edges`` is either an iterable of (source, target) pairs or a mapping
    of pairs to positive weights (parallel edges collapsed into weights).
    Isolated nodes join through ``nodes``.  When ``max_iter`` is reached
    without convergence the partial result carries ``converged=False``.
    Identical inputs give identical results regardless of internal
    scheduling.
    """
    if isinstance(edges, Mapping):
        weighted = dict(edges)
    else:
        weighted = {}
        for u, v in edges:
            weighted[(u, v)] = weighted.get((u, v), 0.0) + 1.0
    node_set = set(nodes)
    for u, v in weighted:
        node_set.add(u)
        node_set.add(v)
    order = sorted(node_set)
    if not order:
        raise ValueError("graph is empty")
    index = {node: i for i, node in enumerate(order)}
    n = len(order)

    out_weight = np.zeros(n)
    for (u, _), w in weighted.items():
        if w < 0:
            raise ValueError("edge weights must be nonnegative")
        out_weight[index[u]] += w
    rows = np.array([index[v] for (_, v) in weighted], dtype=np.intp)
    cols = np.array([index[u] for (u, _) in weighted], dtype=np.intp)
    probs = np.array(
        [w / out_weight[index[u]] for (u, _), w in weighted.items()], dtype=float
    )
    dangling = out_weight == 0.0

    x = np.full(n, 1.0 / n)
    iterations = 0
    residual = math.inf
    for iterations in range(1, max_iter + 1):
        linked = np.zeros(n)
        np.add.at(linked, rows, probs * x[cols])
        dangling_mass = x[dangling].sum()
        x_next = damping * (linked + dangling_mass / n) + (1.0 - damping) / n
        residual = float(np.abs(x_next - x).sum())
        x = x_next
        if residual < tol:
            break
    converged = residual < tol
    return PageRankResult(
        scores={node: float(x[index[node]]) for node in order},
        iterations=iterations,
        converged=converged,
        residual=residual,
    )


def article_citation_graph(
    corpus: Corpus, include_self_citations: bool = True
) -> dict[tuple[str, str], float]:
    """Citation edges between corpus articles (external citers dropped)."""
    graph: dict[tuple[str, str], float] = {}
    for e in corpus.edges:
        if e.citing_id not in corpus:
            continue
        if not include_self_citations and e.is_self_edge:
            continue
        key = (e.citing_id, e.cited_id)
        graph[key] = graph.get(key, 0.0) + 1.0
    return graph


def journal_citation_graph(
    corpus: Corpus, include_self_citations: bool = True
) -> dict[tuple[str, str], float]:
    """Article edges collapsed by journal; parallel edges become weights.

    With ``include_self_citations`` off, journal self-loops are dropped.
    """
    graph: dict[tuple[str, str], float] = {}
    for e in corpus.edges:
        if e.citing_id not in corpus:
            continue
        citing_journal = corpus.get(e.citing_id).journal_id
        cited_journal = corpus.get(e.cited_id).journal_id
        if not include_self_citations and citing_journal == cited_journal:
            continue
        key = (citing_journal, cited_journal)
        graph[key] = graph.get(key, 0.0) + 1.0
    return graph


def h_index(citation_counts: Iterable[int]) -> int:
    """Largest h such that at least h items have at least h citations."""
    ranked = sorted(citation_counts, reverse=True)
    h = 0
    for position, count in enumerate(ranked, start=1):
        if count >= position:
            h = position
        else:
            break
    return h


class IndicatorTable:
    """Per-article indicator values keyed by article id and indicator name."""

    def __init__(self):
        self._values: dict[str, dict[str, float]] = {}
        self._names: list[str] = []

    def set(self, article_id: str, indicator: str, value: float) -> None:
        if indicator not in self._names:
            self._names.append(indicator)
        self._values.setdefault(article_id, {})[indicator] = value

    def get(self, article_id: str, indicator: str) -> float:
        return self._values[article_id][indicator]

    def column(self, indicator: str) -> dict[str, float]:
        return {
            aid: vals[indicator]
            for aid, vals in self._values.items()
            if indicator in vals
        }

    @property
    def indicator_names(self) -> tuple[str, ...]:
        return tuple(self._names)

    def rows(self) -> list[tuple[str, dict[str, float]]]:
        return [(aid, dict(vals)) for aid, vals in self._values.items()]

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, article_id: str) -> bool:
        return article_id in self._values
