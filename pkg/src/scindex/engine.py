"""Shared pipeline helpers behind the CLI and the HTTP service.

These functions tie ingestion, reference statistics, scoring, aggregation,
and export together over an immutable corpus.  They are pure given their
inputs; identical inputs and seeds produce identical outputs.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from . import __version__
from .corpus import (
    Article,
    ClassificationScheme,
    Corpus,
    DocType,
    SchemeMode,
    UnitKind,
    UnitMembership,
    ValidationReport,
    ingest_articles,
    ingest_edges,
    ingest_units,
    resolve_fields,
    units_from_corpus,
)
from .errors import ScindexError
from .indicators import (
    IndicatorTable,
    JournalImpactResult,
    PercentileSpec,
    h_index,
    jif,
    jmnlcs,
    journal_mncs,
    pagerank,
    article_citation_graph,
    journal_citation_graph,
    percentile_flags,
)
from .normalize import (
    DEFAULT_REFERENCE_DOC_TYPES,
    FieldYearStats,
    UNLIMITED_WINDOW,
    WindowSpec,
    build_stats,
    ncs,
    nlcs,
    stats_rows,
)


def format_value(value) -> str:
    """Fixed 6-significant-digit text for reproducible outputs."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def config_hash(config: Mapping) -> str:
    """Short stable digest of an effective configuration."""
    canon = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:12]


def output_header(cfg_hash: str, seed: int | None) -> str:
    seed_text = "-" if seed is None else str(seed)
    return f"# scindex {__version__} config={cfg_hash} seed={seed_text}"


def write_csv(
    path: str | Path,
    header: Sequence[str],
    rows: Iterable[Sequence],
    cfg_hash: str,
    seed: int | None = None,
) -> None:
    """Write a CSV artifact with the engine's provenance comment line."""
    lines = [output_header(cfg_hash, seed), ",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(
    path: str | Path, payload: dict, cfg_hash: str, seed: int | None = None
) -> None:
    """Write a JSON artifact; provenance rides in ``_meta`` since JSON has
    no comments."""
    doc = {
        "_meta": {
            "engine": f"scindex {__version__}",
            "config_hash": cfg_hash,
            "seed": seed,
        }
    }
    doc.update(payload)
    Path(path).write_text(
        json.dumps(doc, sort_keys=True, indent=2, default=_json_default) + "\n",
        encoding="utf-8",
    )


def _json_default(value):
    if isinstance(value, float):
        return float(f"{value:.6g}")
    raise TypeError(f"not JSON serializable: {type(value)}")


def round6(value: float) -> float:
    """Round to six significant digits for JSON payloads."""
    return float(f"{float(value):.6g}")


# --- corpus loading -----------------------------------------------------------


@dataclass
class CorpusBundle:
    corpus: Corpus
    scheme: ClassificationScheme | None
    report: ValidationReport


def load_corpus_bundle(
    articles_path: str | Path,
    edges_path: str | Path | None = None,
    scheme_path: str | Path | None = None,
    scheme_mode: str = "journal_level",
    schema: Mapping[str, str] | None = None,
    year_range: tuple[int, int] | None = None,
) -> CorpusBundle:
    scheme = None
    if scheme_path is not None:
        scheme = ClassificationScheme.from_csv(scheme_path, SchemeMode(scheme_mode))
    corpus, report = ingest_articles(
        articles_path,
        schema=schema,
        require_fields=scheme is None,
        year_range=year_range,
    )
    if edges_path is not None:
        corpus, edge_report = ingest_edges(corpus, edges_path)
        report.extend(edge_report)
    return CorpusBundle(corpus, scheme, report)


@dataclass
class ComputeOptions:
    window: WindowSpec = UNLIMITED_WINDOW
    doc_types: frozenset[DocType] = DEFAULT_REFERENCE_DOC_TYPES
    multi_field_mode: str = "arithmetic"
    include_self_citations: bool = True


def qualifying_articles(corpus: Corpus, options: ComputeOptions) -> list[Article]:
    return [a for a in corpus if a.doc_type in options.doc_types]


def reference_stats(
    bundle: CorpusBundle, options: ComputeOptions
) -> dict[tuple[str, int], FieldYearStats]:
    return build_stats(
        bundle.corpus,
        bundle.scheme,
        options.window,
        options.doc_types,
        options.include_self_citations,
    )


def score_table(
    bundle: CorpusBundle,
    options: ComputeOptions,
    stats: Mapping[tuple[str, int], FieldYearStats] | None = None,
    indicators: Sequence[str] = ("ncs", "nlcs", "citations"),
) -> IndicatorTable:
    """Per-article normalised scores and windowed citation counts."""
    corpus = bundle.corpus
    if stats is None:
        stats = reference_stats(bundle, options)
    table = IndicatorTable()
    for article in qualifying_articles(corpus, options):
        fields = resolve_fields(article, bundle.scheme)
        c = corpus.citation_count(
            article.id, options.window.window_years, options.include_self_citations
        )
        for name in indicators:
            if name == "citations":
                table.set(article.id, name, c)
            elif name == "ncs":
                table.set(
                    article.id,
                    name,
                    ncs(article, stats, options.multi_field_mode,
                        citations=c, fields=fields),
                )
            elif name == "nlcs":
                table.set(
                    article.id,
                    name,
                    nlcs(article, stats, options.multi_field_mode,
                         citations=c, fields=fields),
                )
            else:
                raise ValueError(f"unknown per-article indicator {name!r}")
    return table


def article_values(
    bundle: CorpusBundle,
    options: ComputeOptions,
    table: IndicatorTable,
    name: str,
) -> dict[str, float]:
    """Per-article numeric values for one named axis: a computed indicator
    (ncs, nlcs, citations), a built-in attribute (quality_score, year), or
    any ingested numeric column."""
    if name in ("ncs", "nlcs", "citations"):
        return table.column(name)
    values: dict[str, float] = {}
    for article in qualifying_articles(bundle.corpus, options):
        if name == "quality_score":
            if article.quality_score is not None:
                values[article.id] = float(article.quality_score)
        elif name == "year":
            values[article.id] = float(article.year)
        elif name in article.columns:
            values[article.id] = float(article.columns[name])
    return values


def percentile_table(
    bundle: CorpusBundle, options: ComputeOptions, spec: PercentileSpec
) -> dict[str, dict[float, bool]]:
    """Top-X% flags per article within its field-year group(s).

    A multi-field article is flagged at X when it qualifies in any of its
    groups.
    """
    corpus = bundle.corpus
    groups: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for article in qualifying_articles(corpus, options):
        c = corpus.citation_count(
            article.id, options.window.window_years, options.include_self_citations
        )
        for code in resolve_fields(article, bundle.scheme):
            groups.setdefault((code, article.year), []).append((article.id, c))
    merged: dict[str, dict[float, bool]] = {}
    for group in groups.values():
        flags = percentile_flags(group, spec)
        for article_id, per_threshold in flags.items():
            if article_id not in merged:
                merged[article_id] = dict(per_threshold)
            else:
                for x, flag in per_threshold.items():
                    merged[article_id][x] = merged[article_id][x] or flag
    return merged


def journal_indicators(
    bundle: CorpusBundle,
    options: ComputeOptions,
    indicator: str,
    years: Sequence[int] | None = None,
    jif_year: int | None = None,
    jif_window: int = 2,
    damping: float = 0.85,
) -> list[JournalImpactResult]:
    """Journal-level metric values; journals without qualifying items are
    skipped."""
    corpus = bundle.corpus
    journals = sorted({a.journal_id for a in corpus})
    results: list[JournalImpactResult] = []
    if indicator == "jif":
        if jif_year is None:
            raise ValueError("jif needs a census year")
        for journal in journals:
            try:
                value = jif(corpus, journal, jif_year, jif_window,
                            options.include_self_citations)
            except ScindexError:
                continue
            results.append(
                JournalImpactResult(journal, "jif_window", value, jif_year,
                                    jif_window)
            )
        return results
    if indicator in ("jmnlcs", "journal_mncs"):
        stats = reference_stats(bundle, options)
        fn = jmnlcs if indicator == "jmnlcs" else journal_mncs
        year_set = years if years else sorted({a.year for a in corpus})
        window_years = options.window.window_years or 0
        for journal in journals:
            try:
                value = fn(
                    corpus, journal, year_set, stats, bundle.scheme,
                    options.multi_field_mode, options.doc_types,
                    options.window, options.include_self_citations,
                )
            except ScindexError:
                continue
            results.append(
                JournalImpactResult(journal, indicator, value, max(year_set),
                                    window_years)
            )
        return results
    if indicator == "pagerank":
        graph = journal_citation_graph(corpus, options.include_self_citations)
        if not graph:
            return []
        result = pagerank(graph, damping=damping)
        year = corpus.max_year or 0
        return [
            JournalImpactResult(journal, "pagerank", score, year, 0)
            for journal, score in sorted(result.scores.items())
        ]
    raise ValueError(f"unknown journal indicator {indicator!r}")


def journal_indicator_rows(
    bundle: CorpusBundle,
    options: ComputeOptions,
    indicator: str,
    **kwargs,
) -> list[tuple]:
    """CSV rows ``journal_id,indicator,year,window,value``."""
    return [
        (r.journal_id, r.indicator, r.year, r.window_years, r.value)
        for r in journal_indicators(bundle, options, indicator, **kwargs)
    ]


def article_pagerank_rows(
    bundle: CorpusBundle, options: ComputeOptions, damping: float = 0.85
) -> list[tuple]:
    graph = article_citation_graph(bundle.corpus, options.include_self_citations)
    nodes = bundle.corpus.ids()
    result = pagerank(graph, damping=damping, nodes=nodes)
    return [(aid, score) for aid, score in sorted(result.scores.items())]


def h_index_rows(
    bundle: CorpusBundle, options: ComputeOptions, by: str
) -> list[tuple[str, int]]:
    corpus = bundle.corpus
    units = units_from_corpus(corpus, UnitKind(by))
    rows = []
    for unit in units:
        counts = [
            corpus.citation_count(
                i, options.window.window_years, options.include_self_citations
            )
            for i in sorted(unit.article_ids)
        ]
        rows.append((unit.unit_id, h_index(counts)))
    return rows


def load_units(
    corpus: Corpus,
    by: str | None = None,
    units_path: str | Path | None = None,
) -> tuple[list[UnitMembership], ValidationReport]:
    if units_path is not None:
        return ingest_units(corpus, units_path)
    if by is None:
        raise ValueError("either a unit kind or a units file is required")
    return units_from_corpus(corpus, UnitKind(by)), ValidationReport()


def restrict_units(
    units: Sequence[UnitMembership], keep_ids
) -> list[UnitMembership]:
    """Drop non-qualifying member articles (wrong doc type, unscored) from
    unit memberships; units left empty disappear."""
    keep = set(keep_ids)
    out = []
    for unit in units:
        ids = unit.article_ids & keep
        if ids:
            out.append(UnitMembership(unit.unit_kind, unit.unit_id, frozenset(ids)))
    return out


def load_roster(path: str | Path) -> dict[str, tuple[str, ...]]:
    """Roster CSV ``unit_id,author_id`` -> unit id to author ids."""
    import csv

    grouped: dict[str, list[str]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"unit_id", "author_id"}.issubset(
            reader.fieldnames
        ):
            from .errors import MissingRequiredColumn

            raise MissingRequiredColumn(
                "roster file needs columns unit_id,author_id"
            )
        for row in reader:
            grouped.setdefault(row["unit_id"].strip(), []).append(
                row["author_id"].strip()
            )
    return {k: tuple(v) for k, v in grouped.items()}


def export_stats_rows(
    bundle: CorpusBundle, options: ComputeOptions
) -> list[tuple]:
    return stats_rows(reference_stats(bundle, options))


def tidy_rows(path: str | Path) -> list[tuple[str, str, str]]:
    """Long-format (id, variable, value) rows from a wide CSV artifact."""
    import csv

    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(lines)
    if reader.fieldnames is None:
        return []
    key = reader.fieldnames[0]
    out = []
    for row in reader:
        for column in reader.fieldnames[1:]:
            out.append((row[key], column, row[column]))
    return out
