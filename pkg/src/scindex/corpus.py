"""Corpus data model and ingestion.

Articles, citation edges, classification schemes, and unit memberships are
ingested from JSONL/CSV files into an immutable :class:`Corpus`.  Ingestion
is single-writer; once built, a corpus is safe for concurrent read-only use.

File formats (all UTF-8):

* articles  -- JSONL (one object per line) or CSV with header; ``fields``,
  ``authors``, ``institutions``, ``countries`` are ``|``-separated in CSV.
* edges     -- CSV ``citing_id,citing_year,cited_id``.
* scheme    -- CSV ``entity_id,field_code`` (repeat rows for multi-field).
* units     -- CSV ``unit_kind,unit_id,article_id``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from .errors import EdgesUnavailable, MissingRequiredColumn, UnclassifiedArticle

# Report entry codes; row-level issues are collected, not raised.
MALFORMED_ROW = "MalformedRow"
DUPLICATE_ID = "DuplicateId"
UNKNOWN_CITED_ID = "UnknownCitedId"
SELF_CITATION_EDGE = "SelfCitationEdgeRejected"
CITATION_COUNT_MISMATCH = "CitationCountMismatch"
UNKNOWN_DOC_TYPE = "UnknownDocType"
MISSING_AUTHORS = "MissingAuthors"


class DocType(str, Enum):
    ARTICLE = "article"
    REVIEW = "review"
    EDITORIAL = "editorial"
    LETTER = "letter"
    OTHER = "other"


class SchemeMode(str, Enum):
    JOURNAL_LEVEL = "journal_level"
    ARTICLE_LEVEL = "article_level"


class UnitKind(str, Enum):
    AUTHOR = "author"
    DEPARTMENT = "department"
    INSTITUTION = "institution"
    COUNTRY = "country"
    JOURNAL = "journal"
    FUNDER = "funder"


@dataclass(frozen=True)
class Article:
    """One scholarly output.

    ``citations`` may be None when counts are to be derived from edges.
    ``columns`` holds arbitrary named nonnegative counts (altmetric sources,
    page counts, ...) that flow through normalisation and correlation like
    any other indicator.
    """

    id: str
    year: int
    journal_id: str
    doc_type: DocType = DocType.ARTICLE
    citations: int | None = None
    fields: tuple[str, ...] = ()
    authors: tuple[str, ...] = ()
    institutions: tuple[str, ...] = ()
    countries: tuple[str, ...] = ()
    quality_score: int | None = None
    columns: Mapping[str, float] = dataclasses.field(default_factory=dict)
    title_abstract_text: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("article id must be a nonempty string")
        if self.citations is not None and self.citations < 0:
            raise ValueError(f"citations must be >= 0, got {self.citations}")
        if self.quality_score is not None and self.quality_score not in (1, 2, 3, 4):
            raise ValueError(
                f"quality_score must be in 1..4, got {self.quality_score}"
            )


@dataclass(frozen=True)
class CitationEdge:
    """Directed citation: a document of ``citing_year`` cites ``cited_id``."""

    citing_id: str
    citing_year: int
    cited_id: str

    @property
    def is_self_edge(self) -> bool:
        return self.citing_id == self.cited_id


@dataclass(frozen=True)
class ClassificationScheme:
    """Field assignments at journal or article granularity.

    Field codes are opaque strings; broader/narrower granularities are
    expressed as separate schemes rather than nesting.
    """

    mode: SchemeMode
    assignments: Mapping[str, tuple[str, ...]]

    @classmethod
    def from_csv(cls, path: str | Path, mode: SchemeMode) -> "ClassificationScheme":
        by_entity: dict[str, list[str]] = {}
        reader = _open_csv_rows(Path(path))
        if reader.fieldnames is None or not {"entity_id", "field_code"}.issubset(
            reader.fieldnames
        ):
            raise MissingRequiredColumn(
                f"scheme file {path} needs columns entity_id,field_code"
            )
        for row in reader:
            codes = by_entity.setdefault(row["entity_id"], [])
            if row["field_code"] and row["field_code"] not in codes:
                codes.append(row["field_code"])
        return cls(mode, {k: tuple(v) for k, v in by_entity.items()})


@dataclass(frozen=True)
class UnitMembership:
    """A unit (department, institution, ...) and the articles it submitted.

    An article may belong to several units (collaboration)."""

    unit_kind: UnitKind
    unit_id: str
    article_ids: frozenset[str]


@dataclass
class ValidationIssue:
    code: str
    message: str
    severity: str = "error"  # "error" | "warning"
    row: int | None = None
    entity_id: str | None = None

    def to_dict(self) -> dict:
        out = {"code": self.code, "severity": self.severity, "message": self.message}
        if self.row is not None:
            out["row"] = self.row
        if self.entity_id is not None:
            out["entity_id"] = self.entity_id
        return out


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    def add(self, code, message, severity="error", row=None, entity_id=None):
        self.issues.append(ValidationIssue(code, message, severity, row, entity_id))

    @property
    def errors(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[ValidationIssue]:
        return [i for i in self.issues if i.severity == "warning"]

    def extend(self, other: "ValidationReport") -> None:
        self.issues.extend(other.issues)

    def to_dict(self) -> dict:
        return {
            "n_errors": len(self.errors),
            "n_warnings": len(self.warnings),
            "issues": [i.to_dict() for i in self.issues],
        }


class Corpus:
    """Immutable article + edge store with derived citation lookups."""

    def __init__(
        self,
        articles: Sequence[Article],
        edges: Sequence[CitationEdge] = (),
    ):
        self._articles: dict[str, Article] = {}
        for a in articles:
            if a.id in self._articles:
                raise ValueError(f"duplicate article id {a.id!r}")
            self._articles[a.id] = a
        self._edges = tuple(edges)
        # cited_id -> {citing_id: earliest citing_year}
        self._citers: dict[str, dict[str, int]] = {}
        for e in self._edges:
            seen = self._citers.setdefault(e.cited_id, {})
            if e.citing_id not in seen or e.citing_year < seen[e.citing_id]:
                seen[e.citing_id] = e.citing_year

    def __len__(self) -> int:
        return len(self._articles)

    def __iter__(self) -> Iterator[Article]:
        return iter(self._articles.values())

    def __contains__(self, article_id: str) -> bool:
        return article_id in self._articles

    def get(self, article_id: str) -> Article:
        return self._articles[article_id]

    def ids(self) -> tuple[str, ...]:
        return tuple(self._articles)

    @property
    def edges(self) -> tuple[CitationEdge, ...]:
        return self._edges

    @property
    def has_edges(self) -> bool:
        return bool(self._edges)

    @property
    def min_year(self) -> int | None:
        years = [a.year for a in self]
        return min(years) if years else None

    @property
    def max_year(self) -> int | None:
        years = [a.year for a in self]
        return max(years) if years else None

    def citers(self, article_id: str) -> Mapping[str, int]:
        """Distinct citing documents of an article and their earliest year."""
        return self._citers.get(article_id, {})

    def citation_count(
        self,
        article_id: str,
        window_years: int | None = None,
        include_self_citations: bool = True,
    ) -> int:
        """Number of distinct citing documents, optionally windowed.

        A bounded window keeps citers with ``citing_year - published_year``
        at most ``window_years`` (inclusive) and requires ingested edges.
        The unlimited window falls back to the stored count when there are
        no edges; ``include_self_citations`` is only effective with edges.
        """
        article = self._articles[article_id]
        if not self.has_edges:
            if window_years is not None:
                raise EdgesUnavailable(
                    "windowed citation counts require ingested edges"
                )
            return article.citations or 0
        count = 0
        for citing_id, citing_year in self._citers.get(article_id, {}).items():
            if not include_self_citations and citing_id == article_id:
                continue
            if window_years is not None and citing_year - article.year > window_years:
                continue
            count += 1
        return count


def resolve_fields(
    article: Article, *schemes: ClassificationScheme | None
) -> tuple[str, ...]:
    """Resolve an article's field codes.

    Precedence: article-level scheme assignments, then journal-level, then
    the article's own ingested ``fields``.  Raises
    :class:`UnclassifiedArticle` when nothing applies.
    """
    given = [s for s in schemes if s is not None]
    for scheme in given:
        if scheme.mode is SchemeMode.ARTICLE_LEVEL:
            codes = scheme.assignments.get(article.id)
            if codes:
                return tuple(codes)
    for scheme in given:
        if scheme.mode is SchemeMode.JOURNAL_LEVEL:
            codes = scheme.assignments.get(article.journal_id)
            if codes:
                return tuple(codes)
    if article.fields:
        return tuple(article.fields)
    raise UnclassifiedArticle(f"article {article.id!r} has no field assignment")


# --- article ingestion ----------------------------------------------------

_LIST_FIELDS = ("fields", "authors", "institutions", "countries")
_CANONICAL = (
    "id",
    "year",
    "journal_id",
    "doc_type",
    "citations",
    "fields",
    "authors",
    "institutions",
    "countries",
    "quality_score",
    "title_abstract_text",
)


def _parse_doc_type(raw, report: ValidationReport, row_no: int):
    if raw is None or raw == "":
        raw = "other"
    try:
        return DocType(str(raw).strip().lower())
    except ValueError:
        report.add(
            UNKNOWN_DOC_TYPE,
            f"unknown doc_type {raw!r} mapped to 'other'",
            severity="warning",
            row=row_no,
        )
        return DocType.OTHER


def _parse_list(value) -> tuple[str, ...]:
    if value is None:
        return ()
    if isinstance(value, (list, tuple)):
        return tuple(str(v) for v in value if str(v))
    text = str(value).strip()
    if not text:
        return ()
    return tuple(part for part in (p.strip() for p in text.split("|")) if part)


def _parse_optional_int(value, name: str) -> int | None:
    if value is None or value == "":
        return None
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be an integer, got {value!r}")


def _row_to_article(
    raw: Mapping, schema: Mapping[str, str] | None, report, row_no, year_range
) -> Article | None:
    """Build one Article from a raw row; returns None and reports on failure."""

    def col(name):
        key = schema.get(name, name) if schema else name
        return raw.get(key)

    try:
        art_id = str(col("id") or "").strip()
        if not art_id:
            raise ValueError("missing id")
        year_raw = col("year")
        if year_raw is None or year_raw == "":
            raise ValueError("missing year")
        year = int(year_raw)
        if year_range is not None and not (year_range[0] <= year <= year_range[1]):
            raise ValueError(
                f"year {year} outside corpus range {year_range[0]}..{year_range[1]}"
            )
        journal_id = str(col("journal_id") or "").strip()
        if not journal_id:
            raise ValueError("missing journal_id")
        citations = _parse_optional_int(col("citations"), "citations")
        quality = _parse_optional_int(col("quality_score"), "quality_score")
        text = col("title_abstract_text")
        text = str(text) if text not in (None, "") else None

        columns: dict[str, float] = {}
        canonical_keys = {
            (schema.get(name, name) if schema else name) for name in _CANONICAL
        }
        for key, value in raw.items():
            if key in canonical_keys or value in (None, ""):
                continue
            try:
                num = float(value)
            except (TypeError, ValueError):
                report.add(
                    MALFORMED_ROW,
                    f"column {key!r} is not numeric; ignored",
                    severity="warning",
                    row=row_no,
                )
                continue
            if num < 0:
                raise ValueError(f"column {key!r} must be a nonnegative count")
            columns[key] = num

        article = Article(
            id=art_id,
            year=year,
            journal_id=journal_id,
            doc_type=_parse_doc_type(col("doc_type"), report, row_no),
            citations=citations,
            fields=_parse_list(col("fields")),
            authors=_parse_list(col("authors")),
            institutions=_parse_list(col("institutions")),
            countries=_parse_list(col("countries")),
            quality_score=quality,
            columns=columns,
            title_abstract_text=text,
        )
    except ValueError as exc:
        report.add(MALFORMED_ROW, str(exc), row=row_no)
        return None
    if not article.authors:
        report.add(
            MISSING_AUTHORS,
            f"article {article.id!r} has no authors",
            severity="warning",
            row=row_no,
            entity_id=article.id,
        )
    return article


def _open_csv_rows(path: Path):
    """CSV lines with engine provenance comments ('#'-prefixed) skipped."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return csv.DictReader(lines)


def _iter_rows(path: Path):
    """Yield (row_number, mapping) pairs from a JSONL or CSV file."""
    if path.suffix.lower() in (".jsonl", ".json", ".ndjson"):
        with open(path, encoding="utf-8") as fh:
            for row_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                yield row_no, json.loads(line)
    else:
        reader = _open_csv_rows(path)
        yield 0, {"__header__": reader.fieldnames}
        for row_no, row in enumerate(reader, start=2):
            yield row_no, row


def ingest_articles(
    path: str | Path,
    schema: Mapping[str, str] | None = None,
    *,
    require_fields: bool = True,
    year_range: tuple[int, int] | None = None,
) -> tuple[Corpus, ValidationReport]:
    """Ingest articles from a JSONL or CSV file.

    ``schema`` maps canonical column names to the file's column names.
    ``require_fields`` should be False when a classification scheme supplies
    field codes instead of a ``fields`` column.  Rows failing validation are
    rejected and listed in the report; rows repeating an id keep the first
    occurrence.  Ingestion is deterministic: the same file always yields an
    identical corpus.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    report = ValidationReport()
    required = ["id", "year", "journal_id", "doc_type"]
    if require_fields:
        required.append("fields")

    articles: dict[str, Article] = {}
    header_checked = False
    for row_no, raw in _iter_rows(path):
        if "__header__" in raw:
            header = raw["__header__"] or []
            for name in required:
                actual = schema.get(name, name) if schema else name
                if actual not in header:
                    raise MissingRequiredColumn(
                        f"required column {actual!r} not in {path.name}"
                    )
            header_checked = True
            continue
        if not header_checked and path.suffix.lower() in (".jsonl", ".json", ".ndjson"):
            missing = [
                name
                for name in required
                if (schema.get(name, name) if schema else name) not in raw
            ]
            if missing:
                report.add(
                    MALFORMED_ROW, f"missing required keys {missing}", row=row_no
                )
                continue
        article = _row_to_article(raw, schema, report, row_no, year_range)
        if article is None:
            continue
        if article.id in articles:
            report.add(
                DUPLICATE_ID,
                f"duplicate id {article.id!r}; first occurrence kept",
                row=row_no,
                entity_id=article.id,
            )
            continue
        articles[article.id] = article
    return Corpus(list(articles.values())), report


# --- edge ingestion --------------------------------------------------------


def ingest_edges(
    corpus: Corpus, path: str | Path
) -> tuple[Corpus, ValidationReport]:
    """Ingest citation edges and derive per-article citation counts.

    Duplicate (citing, cited) pairs collapse to one citation with the
    earliest citing year.  Citation counts become the number of distinct
    citing documents per cited article; when explicit counts disagree with
    derived ones the derived counts win and the discrepant ids are listed
    in a warning.  Self-edges (citing_id == cited_id) are kept but flagged;
    indicator operations accept an include-self-citations switch.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    report = ValidationReport()
    min_year = corpus.min_year

    edges: dict[tuple[str, str], int] = {}
    reader = _open_csv_rows(path)
    needed = {"citing_id", "citing_year", "cited_id"}
    if reader.fieldnames is None or not needed.issubset(reader.fieldnames):
        raise MissingRequiredColumn(
            f"edge file {path.name} needs columns citing_id,citing_year,cited_id"
        )
    for row_no, row in enumerate(reader, start=2):
        citing_id = (row["citing_id"] or "").strip()
        cited_id = (row["cited_id"] or "").strip()
        try:
            citing_year = int(row["citing_year"])
        except (TypeError, ValueError):
            report.add(
                MALFORMED_ROW,
                f"citing_year {row['citing_year']!r} is not an integer",
                row=row_no,
            )
            continue
        if not citing_id or not cited_id:
            report.add(MALFORMED_ROW, "missing citing_id or cited_id", row=row_no)
            continue
        if cited_id not in corpus:
            report.add(
                UNKNOWN_CITED_ID,
                f"cited id {cited_id!r} not in corpus",
                row=row_no,
                entity_id=cited_id,
            )
            continue
        if min_year is not None and citing_year < min_year:
            report.add(
                MALFORMED_ROW,
                f"citing_year {citing_year} precedes earliest corpus year {min_year}",
                row=row_no,
            )
            continue
        if citing_id == cited_id:
            report.add(
                SELF_CITATION_EDGE,
                f"self-citation edge on {cited_id!r} kept and flagged",
                severity="warning",
                row=row_no,
                entity_id=cited_id,
            )
        key = (citing_id, cited_id)
        if key not in edges or citing_year < edges[key]:
            edges[key] = citing_year

    edge_objs = [
        CitationEdge(citing, year, cited) for (citing, cited), year in edges.items()
    ]
    derived: dict[str, int] = {}
    for e in edge_objs:
        derived[e.cited_id] = derived.get(e.cited_id, 0) + 1

    mismatched = []
    rebuilt = []
    for article in corpus:
        count = derived.get(article.id, 0)
        if article.citations is not None and article.citations != count:
            mismatched.append(article.id)
        rebuilt.append(dataclasses.replace(article, citations=count))
    if mismatched:
        report.add(
            CITATION_COUNT_MISMATCH,
            "explicit citation counts replaced by edge-derived counts for ids: "
            + ", ".join(sorted(mismatched)),
            severity="warning",
        )
    return Corpus(rebuilt, edge_objs), report


# --- unit memberships -------------------------------------------------------


def ingest_units(
    corpus: Corpus, path: str | Path
) -> tuple[list[UnitMembership], ValidationReport]:
    """Ingest unit memberships from CSV ``unit_kind,unit_id,article_id``."""
    path = Path(path)
    report = ValidationReport()
    grouped: dict[tuple[UnitKind, str], set[str]] = {}
    reader = _open_csv_rows(path)
    needed = {"unit_kind", "unit_id", "article_id"}
    if reader.fieldnames is None or not needed.issubset(reader.fieldnames):
        raise MissingRequiredColumn(
            f"unit file {path.name} needs columns unit_kind,unit_id,article_id"
        )
    for row_no, row in enumerate(reader, start=2):
        try:
            kind = UnitKind(row["unit_kind"].strip().lower())
        except (ValueError, AttributeError):
            report.add(
                MALFORMED_ROW,
                f"unknown unit_kind {row['unit_kind']!r}",
                row=row_no,
            )
            continue
        article_id = (row["article_id"] or "").strip()
        if article_id not in corpus:
            report.add(
                MALFORMED_ROW,
                f"article id {article_id!r} not in corpus",
                row=row_no,
                entity_id=article_id,
            )
            continue
        grouped.setdefault((kind, row["unit_id"].strip()), set()).add(article_id)
    units = [
        UnitMembership(kind, unit_id, frozenset(ids))
        for (kind, unit_id), ids in grouped.items()
    ]
    units.sort(key=lambda u: (u.unit_kind.value, u.unit_id))
    return units, report


def units_from_corpus(corpus: Corpus, kind: UnitKind) -> list[UnitMembership]:
    """Derive unit memberships from article attributes.

    Supports author, institution, country, and journal units; departments
    and funders need an explicit membership file.
    """
    attr = {
        UnitKind.AUTHOR: lambda a: a.authors,
        UnitKind.INSTITUTION: lambda a: a.institutions,
        UnitKind.COUNTRY: lambda a: a.countries,
        UnitKind.JOURNAL: lambda a: (a.journal_id,),
    }.get(kind)
    if attr is None:
        raise ValueError(f"unit kind {kind.value!r} needs an explicit membership file")
    grouped: dict[str, set[str]] = {}
    for article in corpus:
        for unit_id in attr(article):
            grouped.setdefault(unit_id, set()).add(article.id)
    return [
        UnitMembership(kind, unit_id, frozenset(ids))
        for unit_id, ids in sorted(grouped.items())
    ]
