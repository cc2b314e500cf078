import pytest

from scindex.errors import InvalidSpec
from scindex.normalize import build_stats, nlcs
from scindex.simulate import (
    SimulationConfig,
    SynthCorpusSpec,
    sample_mean_distribution,
    synth_corpus,
    worked_example,
)
from scindex.validate import spearman


class TestWorkedExample:
    def test_exact_probabilities(self):
        summary = worked_example()
        assert summary.mean == 1.5
        assert summary.p_exact == 0.2
        assert summary.p_below_average == 0.2
        assert summary.p_overestimate == 0.4
        assert summary.p_underestimate == 0.4

    def test_values_are_the_fixed_set(self):
        assert worked_example().values == (
            0.5, 0.5, 1.0, 1.0, 1.5, 1.5, 2.0, 2.0, 2.5, 2.5,
        )


class TestSampleMeanDistribution:
    def test_no_aggregation_keeps_sigma(self):
        result = sample_mean_distribution(
            SimulationConfig(q=0.0, n=1, trials=4000, sigma=1.0, seed=3)
        )
        assert result.sd_of_means == pytest.approx(1.0, rel=0.05)

    def test_shrinks_like_inverse_root_n(self):
        result = sample_mean_distribution(
            SimulationConfig(q=1.5, n=100, trials=10000, sigma=1.0, seed=42)
        )
        assert result.expected_sd == pytest.approx(0.1)
        assert abs(result.sd_of_means - 0.1) / 0.1 < 0.05

    def test_symmetric_mean(self):
        result = sample_mean_distribution(
            SimulationConfig(q=0.0, n=10, trials=5000, seed=7)
        )
        assert result.mean_of_means == pytest.approx(0.0, abs=0.02)

    def test_deterministic_per_seed(self):
        config = SimulationConfig(q=1.0, n=5, trials=100, seed=11)
        first = sample_mean_distribution(config)
        second = sample_mean_distribution(config)
        assert first.mean_of_means == second.mean_of_means
        assert first.sd_of_means == second.sd_of_means

    def test_error_shrinks_with_more_trials(self):
        errors = []
        for trials in (200, 20000):
            result = sample_mean_distribution(
                SimulationConfig(q=0.0, n=25, trials=trials, seed=19)
            )
            errors.append(abs(result.sd_of_means - result.expected_sd))
        assert errors[1] < errors[0]

    def test_invalid_config(self):
        with pytest.raises(InvalidSpec):
            SimulationConfig(q=0.0, n=0, trials=10)
        with pytest.raises(InvalidSpec):
            SimulationConfig(q=0.0, n=1, trials=1, sigma=0.0)


def small_spec(**overrides):
    base = dict(
        n_articles=300,
        n_units=6,
        n_fields=2,
        n_journals=4,
        years=(2017, 2018),
        max_authors=3,
    )
    base.update(overrides)
    return SynthCorpusSpec(**base)


class TestSynthCorpus:
    def test_deterministic_per_seed(self):
        a = synth_corpus(small_spec(), seed=5)
        b = synth_corpus(small_spec(), seed=5)
        assert list(a.corpus) == list(b.corpus)
        assert a.corpus.edges == b.corpus.edges
        assert a.latent_quality == b.latent_quality

    def test_different_seeds_differ(self):
        a = synth_corpus(small_spec(), seed=5)
        b = synth_corpus(small_spec(), seed=6)
        assert list(a.corpus) != list(b.corpus)

    def test_edges_match_citation_counts(self):
        result = synth_corpus(small_spec(), seed=2)
        for article in result.corpus:
            assert article.citations == len(result.corpus.citers(article.id))

    def test_noiseless_link_is_monotone(self):
        spec = small_spec(
            n_fields=1, n_journals=2, years=(2018,),
            citation_noise_sd=0.0, zero_inflation=0.0,
            quality_citation_link=1.2,
        )
        result = synth_corpus(spec, seed=9)
        pairs = sorted(
            (result.latent_quality[a.id], a.citations) for a in result.corpus
        )
        counts = [c for _, c in pairs]
        assert counts == sorted(counts)  # citations nondecreasing in quality
        rho = spearman(
            [q for q, _ in pairs], [c for _, c in pairs]
        ).rho
        assert rho > 0.95

    def test_quality_independent_spec_null_correlation(self):
        spec = small_spec(n_articles=400, quality_citation_link=0.0)
        result = synth_corpus(spec, seed=33)
        quality = [result.latent_quality[a.id] for a in result.corpus]
        citations = [float(a.citations) for a in result.corpus]
        check = spearman(quality, citations)
        assert check.ci_low < 0 < check.ci_high

    def test_aggregation_strengthens_correlation(self):
        spec = SynthCorpusSpec()  # default: 2000 articles, 20 units
        result = synth_corpus(spec, seed=1)
        stats = build_stats(result.corpus, result.scheme)
        scores = {
            a.id: nlcs(a, stats, citations=a.citations)
            for a in result.corpus
        }
        quality = result.latent_quality
        ids = sorted(scores)
        article_rho = spearman(
            [quality[i] for i in ids], [scores[i] for i in ids]
        ).rho
        unit_rho = spearman(
            [
                sum(quality[i] for i in sorted(u.article_ids)) / len(u.article_ids)
                for u in result.units
            ],
            [
                sum(scores[i] for i in sorted(u.article_ids)) / len(u.article_ids)
                for u in result.units
            ],
        ).rho
        assert article_rho > 0
        assert unit_rho > article_rho

    def test_unit_bias_multiplier_shifts_counts(self):
        biased = small_spec(unit_citation_bias={"U000": 5.0})
        result = synth_corpus(biased, seed=4)
        flat = synth_corpus(small_spec(), seed=4)
        boosted = [
            a.citations for a in result.corpus if a.institutions == ("U000",)
        ]
        baseline = [
            a.citations for a in flat.corpus if a.institutions == ("U000",)
        ]
        assert sum(boosted) > sum(baseline)

    def test_invalid_specs(self):
        with pytest.raises(InvalidSpec):
            SynthCorpusSpec(n_articles=0)
        with pytest.raises(InvalidSpec):
            SynthCorpusSpec(zero_inflation=1.0)
        with pytest.raises(InvalidSpec):
            SynthCorpusSpec(years=())
        with pytest.raises(InvalidSpec):
            SynthCorpusSpec(score_quantiles=(0.5, 0.4, 0.9))

    def test_scores_respect_quantiles(self):
        result = synth_corpus(small_spec(n_articles=1000), seed=8)
        scores = [a.quality_score for a in result.corpus]
        assert set(scores) == {1, 2, 3, 4}
        share_4 = scores.count(4) / len(scores)
        assert share_4 == pytest.approx(0.2, abs=0.05)

    def test_units_cover_corpus(self):
        result = synth_corpus(small_spec(), seed=12)
        covered = set()
        for unit in result.units:
            covered |= unit.article_ids
        assert covered == set(result.corpus.ids())
        for unit in result.units:
            roster = result.roster[unit.unit_id]
            for aid in unit.article_ids:
                authors = result.corpus.get(aid).authors
                assert all(a in roster for a in authors)
