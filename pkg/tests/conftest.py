import csv
import json
from pathlib import Path

import pytest

from scindex.corpus import Article, CitationEdge, Corpus, DocType


def make_article(
    article_id,
    year=2020,
    journal_id="J1",
    doc_type=DocType.ARTICLE,
    citations=0,
    fields=("F1",),
    authors=("au1",),
    **kwargs,
):
    return Article(
        id=article_id,
        year=year,
        journal_id=journal_id,
        doc_type=doc_type,
        citations=citations,
        fields=tuple(fields),
        authors=tuple(authors),
        **kwargs,
    )


def write_jsonl(path: Path, rows) -> Path:
    lines = [json.dumps(row, sort_keys=True) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_csv_file(path: Path, header, rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def article_row(article_id, year=2020, journal_id="J1", **kwargs):
    row = {
        "id": article_id,
        "year": year,
        "journal_id": journal_id,
        "doc_type": kwargs.pop("doc_type", "article"),
        "citations": kwargs.pop("citations", 0),
        "fields": kwargs.pop("fields", ["F1"]),
        "authors": kwargs.pop("authors", ["au1"]),
    }
    row.update(kwargs)
    return row


@pytest.fixture
def tiny_corpus():
    """Five articles in one field-year group, cited 0..4."""
    articles = [
        make_article(f"A{i}", citations=i, authors=(f"au{i}",)) for i in range(5)
    ]
    return Corpus(articles)


def corpus_with_edges(cited_year=2011, citing_years=(2012, 2014)):
    target = make_article("A1", year=cited_year, citations=len(citing_years))
    others = [make_article("B1", year=cited_year, citations=0)]
    edges = [
        CitationEdge(f"ext{i}", y, "A1") for i, y in enumerate(citing_years)
    ]
    return Corpus([target] + others, edges)
