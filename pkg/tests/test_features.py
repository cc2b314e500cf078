import math

import pytest

from conftest import make_article
from scindex.corpus import Corpus
from scindex.errors import EmptyText, UnknownAuthor
from scindex.features import (
    FEATURE_NAMES,
    FeatureBuilder,
    author_mnlcs,
    clean_abstract,
    count_syllables,
    feature_vector,
    readability,
)
from scindex.normalize import build_stats


class TestReadability:
    def test_hand_evaluated_formula(self):
        # 3 words, 1 sentence, 3 syllables
        assert readability("The cat sat.") == pytest.approx(
            0.39 * 3 + 11.8 * 1 - 15.59, abs=1e-12
        )
        assert readability("The cat sat.") == pytest.approx(-2.62, abs=1e-9)

    def test_duplicated_sentence_invariant(self):
        text = "The quick brown fox jumps over the lazy dog."
        assert readability(text + " " + text) == pytest.approx(
            readability(text), abs=1e-12
        )

    def test_punctuation_only_raises(self):
        with pytest.raises(EmptyText):
            readability("... ?! --")

    def test_copyright_and_headings_stripped(self):
        cleaned = clean_abstract(
            "Background: The cat sat.\n© 2021 Some Publisher. All rights reserved."
        )
        assert "Background" not in cleaned
        assert "Publisher" not in cleaned
        assert "The cat sat." in cleaned

    def test_readability_of_structured_abstract(self):
        plain = readability("The cat sat.")
        structured = readability("Results: The cat sat.\nCopyright 2020 Elsevier.")
        assert structured == plain

    def test_syllable_heuristic(self):
        assert count_syllables("cat") == 1
        assert count_syllables("table") == 1  # vowel groups a, e; silent e drops
        assert count_syllables("readability") == 5
        assert count_syllables("the") == 1  # floor of one
        assert count_syllables("2024") == 1

    def test_no_terminal_punctuation_is_one_sentence(self):
        assert readability("the cat sat") == pytest.approx(
            0.39 * 3 + 11.8 * 1 - 15.59, abs=1e-12
        )


def feature_fixture():
    """Solo-author target plus enough context for every component."""
    articles = [
        make_article(
            "T",
            year=2018,
            journal_id="JT",
            citations=3,
            fields=("F1",),
            authors=("solo",),
            institutions=("I1", "I2"),
            countries=("GB",),
            columns={"pages": 10.0},
            title_abstract_text="The cat sat. The dog ran.",
        ),
        make_article(
            "O1", year=2018, journal_id="JT", citations=1, authors=("solo", "peer"),
            columns={"pages": 20.0},
        ),
        make_article(
            "O2", year=2018, journal_id="JO", citations=0, authors=("peer",),
            columns={"pages": 30.0},
        ),
        make_article("O3", year=2018, journal_id="JO", citations=7, authors=("peer",)),
    ]
    return Corpus(articles)


def brute_nlcs_map(corpus):
    by_group = {}
    for a in corpus:
        by_group.setdefault((a.fields[0], a.year), []).append(a)
    out = {}
    for (f, y), members in by_group.items():
        lmean = sum(math.log(1 + m.citations) for m in members) / len(members)
        for m in members:
            out[m.id] = math.log(1 + m.citations) / lmean if lmean > 0 else (
                1.0 if m.citations == 0 else None
            )
    return out


class TestAuthorMnlcs:
    def test_mean_of_two(self):
        corpus = feature_fixture()
        stats = build_stats(corpus)
        expected = brute_nlcs_map(corpus)
        got = author_mnlcs("solo", corpus, stats)
        assert got == pytest.approx(
            (expected["T"] + expected["O1"]) / 2, rel=1e-12
        )

    def test_single_article_author(self):
        corpus = Corpus([make_article("A1", citations=2, authors=("only",)),
                         make_article("A2", citations=0, authors=("x",))])
        stats = build_stats(corpus)
        expected = brute_nlcs_map(corpus)
        assert author_mnlcs("only", corpus, stats) == pytest.approx(
            expected["A1"], rel=1e-12
        )

    def test_unknown_author(self):
        corpus = feature_fixture()
        stats = build_stats(corpus)
        with pytest.raises(UnknownAuthor):
            author_mnlcs("nobody", corpus, stats)

    def test_two_field_author_recomputed_from_rows(self):
        corpus = Corpus(
            [
                make_article("P1", fields=("A",), citations=4, authors=("dual",)),
                make_article("P2", fields=("B",), citations=1, authors=("dual",)),
                make_article("P3", fields=("A",), citations=0, authors=("x",)),
                make_article("P4", fields=("B",), citations=3, authors=("y",)),
            ]
        )
        stats = build_stats(corpus)
        expected = brute_nlcs_map(corpus)
        assert author_mnlcs("dual", corpus, stats) == pytest.approx(
            (expected["P1"] + expected["P2"]) / 2, rel=1e-12
        )


class TestFeatureVector:
    def test_componentwise_oracle(self):
        corpus = feature_fixture()
        stats = build_stats(corpus)
        nl = brute_nlcs_map(corpus)
        vec = feature_vector(corpus.get("T"), corpus, stats, reference_year=2021)
        # independent expectations, one per component
        assert vec.nlcs == pytest.approx(nl["T"], rel=1e-12)
        assert vec.log_n_authors == math.log1p(1)
        assert vec.log_n_institutions == math.log1p(2)
        assert vec.log_n_countries == math.log1p(1)
        assert vec.first_author_log_output == math.log1p(2)  # solo has 2 articles
        assert vec.first_author_mnlcs == pytest.approx(
            (nl["T"] + nl["O1"]) / 2, rel=1e-12
        )
        assert vec.max_author_mnlcs == vec.first_author_mnlcs  # solo author
        assert vec.n_pages == 10.0
        # 6 words, 2 sentences, 6 syllables
        assert vec.abstract_readability == pytest.approx(
            0.39 * 3 + 11.8 * 1 - 15.59, abs=1e-12
        )
        # age 3 -> same-year journal mean over JT 2018 = {T, O1}
        assert vec.journal_mnlcs == pytest.approx(
            (nl["T"] + nl["O1"]) / 2, rel=1e-12
        )

    def test_zero_citation_article_nlcs_zero(self):
        corpus = feature_fixture()
        stats = build_stats(corpus)
        builder = FeatureBuilder(corpus, stats, reference_year=2021)
        assert builder.article_nlcs("O2") == 0.0

    def test_missing_pages_imputed_field_median(self):
        corpus = feature_fixture()
        stats = build_stats(corpus)
        builder = FeatureBuilder(corpus, stats, reference_year=2021)
        # O3 lacks pages; field F1 medians over {10, 20, 30} = 20
        assert builder.pages(corpus.get("O3")) == 20.0

    def test_young_article_uses_pooled_journal_window(self):
        corpus = Corpus(
            [
                make_article("N1", year=2020, journal_id="JN", citations=2,
                             authors=("a",)),
                make_article("N0", year=2019, journal_id="JN", citations=4,
                             authors=("b",)),
                make_article("X", year=2020, journal_id="JX", citations=0,
                             authors=("c",)),
                make_article("X2", year=2019, journal_id="JX", citations=1,
                             authors=("d",)),
            ]
        )
        stats = build_stats(corpus)
        nl = brute_nlcs_map(corpus)
        builder = FeatureBuilder(corpus, stats, reference_year=2021)
        # age 1: pooled over JN 2018-2020 = {N0, N1}
        assert builder.journal_mnlcs(corpus.get("N1")) == pytest.approx(
            (nl["N1"] + nl["N0"]) / 2, rel=1e-12
        )
        # age 2 for N0: trailing window 2017-2019 holds only N0 itself
        assert builder.journal_mnlcs(corpus.get("N0")) == pytest.approx(
            nl["N0"], rel=1e-12
        )

    def test_log_fields_exact(self):
        corpus = feature_fixture()
        stats = build_stats(corpus)
        vec = feature_vector(corpus.get("T"), corpus, stats, reference_year=2021)
        assert vec.log_n_authors == math.log1p(1)
        assert vec.log_n_institutions == math.log1p(2)
        assert vec.log_n_countries == math.log1p(1)
        assert all(
            getattr(vec, name) >= 0
            for name in ("log_n_authors", "log_n_institutions", "log_n_countries")
        )

    def test_order_independence(self):
        corpus = feature_fixture()
        stats = build_stats(corpus)
        reversed_corpus = Corpus(list(corpus)[::-1])
        vec1 = feature_vector(corpus.get("T"), corpus, stats, reference_year=2021)
        vec2 = feature_vector(
            reversed_corpus.get("T"), reversed_corpus, stats, reference_year=2021
        )
        assert vec1 == vec2

    def test_vector_has_ten_named_fields(self):
        corpus = feature_fixture()
        stats = build_stats(corpus)
        vec = feature_vector(corpus.get("T"), corpus, stats, reference_year=2021)
        assert len(FEATURE_NAMES) == 10
        assert set(vec.as_dict()) == set(FEATURE_NAMES)

    def test_missing_text_propagates(self):
        corpus = feature_fixture()
        stats = build_stats(corpus)
        with pytest.raises(EmptyText):
            feature_vector(corpus.get("O1"), corpus, stats, reference_year=2021)
