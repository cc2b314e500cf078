"""Monte Carlo probability model and synthetic-corpus generation.

The probability model treats a per-article indicator as a noisy estimate of
true quality: normally distributed around the true value, so the standard
deviation of the mean over n articles shrinks to sigma/sqrt(n) and
aggregate indicators outperform article-level ones in the absence of bias.

The synthetic generator produces desk-scale corpora with latent article
quality, quality-linked log-normally skewed citation counts (many zeros, a
few large values), field/year/journal structure, unit memberships, and
star scores, all reproducible from one seed.

RNG: philox4x64-10 (``numpy.random.Philox``), streams derived with
``SeedSequence([seed, index])``; the algorithm name is echoed in outputs so
runs stay reproducible across machines.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .corpus import (
    Article,
    CitationEdge,
    ClassificationScheme,
    Corpus,
    DocType,
    SchemeMode,
    UnitKind,
    UnitMembership,
)
from .errors import InvalidSpec

RNG_ALGORITHM = "philox4x64-10 (numpy.random.Philox, SeedSequence-derived)"


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence([seed, *stream]))
    )


# --- worked probability example ----------------------------------------------

# Ten articles of identical true quality 1.5, as estimated by a noisy
# indicator; the single-draw estimate is often wrong but the mean is exact.
WORKED_EXAMPLE_VALUES = (0.5, 0.5, 1.0, 1.0, 1.5, 1.5, 2.0, 2.0, 2.5, 2.5)
WORKED_EXAMPLE_TRUE_QUALITY = 1.5


@dataclass(frozen=True)
class WorkedExampleSummary:
    values: tuple[float, ...]
    mean: float
    p_exact: float
    p_below_average: float
    p_overestimate: float
    p_underestimate: float

    def as_dict(self) -> dict:
        return {
            "values": list(self.values),
            "mean": self.mean,
            "p_exact": self.p_exact,
            "p_below_average": self.p_below_average,
            "p_overestimate": self.p_overestimate,
            "p_underestimate": self.p_underestimate,
        }


def worked_example() -> WorkedExampleSummary:
    """Exact probabilities for the fixed ten-value indicator example."""
    values = WORKED_EXAMPLE_VALUES
    true = WORKED_EXAMPLE_TRUE_QUALITY
    n = len(values)
    return WorkedExampleSummary(
        values=values,
        mean=sum(values) / n,
        p_exact=sum(1 for v in values if v == true) / n,
        p_below_average=sum(1 for v in values if v < 1.0) / n,
        p_overestimate=sum(1 for v in values if v > true) / n,
        p_underestimate=sum(1 for v in values if v < true) / n,
    )


# --- sampling distribution of the mean ----------------------------------------


@dataclass(frozen=True)
class SimulationConfig:
    q: float
    n: int
    trials: int
    sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.sigma <= 0:
            raise InvalidSpec("sigma must be positive")
        if self.n < 1 or self.trials < 1:
            raise InvalidSpec("n and trials must be at least 1")


@dataclass(frozen=True)
class SampleMeanResult:
    mean_of_means: float
    sd_of_means: float
    expected_sd: float
    config: SimulationConfig
    rng_algorithm: str = RNG_ALGORITHM

    def as_dict(self) -> dict:
        return {
            "mean_of_means": self.mean_of_means,
            "sd_of_means": self.sd_of_means,
            "expected_sd": self.expected_sd,
            "q": self.config.q,
            "sigma": self.config.sigma,
            "n": self.config.n,
            "trials": self.config.trials,
            "seed": self.config.seed,
            "rng": self.rng_algorithm,
        }


def sample_mean_distribution(config: SimulationConfig) -> SampleMeanResult:
    """Empirical moments of the sample mean of n noisy indicator draws.

    Trial i uses its own generator seeded from (seed, i), so runs are
    reproducible and order-independent under any parallel schedule.
    """
    means = np.empty(config.trials)
    for i in range(config.trials):
        rng = _rng(config.seed, i)
        means[i] = rng.normal(config.q, config.sigma, size=config.n).mean()
    sd = float(means.std(ddof=1)) if config.trials > 1 else 0.0
    return SampleMeanResult(
        mean_of_means=float(means.mean()),
        sd_of_means=sd,
        expected_sd=config.sigma / math.sqrt(config.n),
        config=config,
    )


# --- synthetic corpus ----------------------------------------------------------


@dataclass(frozen=True)
class SynthCorpusSpec:
    """Shape and strength parameters for a synthetic corpus.

    ``quality_citation_link`` scales how strongly latent quality drives the
    log-normal citation mean; 0 decouples them entirely.
    ``unit_citation_bias`` multiplies the expected citations of a unit's
    articles, modelling a systematic per-unit bias of unspecified origin.
    ``score_quantiles`` cut latent quality into star classes 1..4.
    """

    n_articles: int = 2000
    n_units: int = 20
    n_fields: int = 4
    n_journals: int = 12
    years: tuple[int, ...] = (2016, 2017, 2018)
    max_authors: int = 4
    unit_quality_sd: float = 0.5
    article_quality_sd: float = 0.5
    quality_citation_link: float = 0.8
    citation_noise_sd: float = 1.0
    citation_base: float = 1.0
    zero_inflation: float = 0.1
    unit_citation_bias: Mapping[str, float] = field(default_factory=dict)
    score_quantiles: tuple[float, ...] = (0.15, 0.45, 0.80)

    def __post_init__(self):
        if min(self.n_articles, self.n_units, self.n_fields, self.n_journals) < 1:
            raise InvalidSpec("all counts must be positive")
        if not self.years:
            raise InvalidSpec("at least one publication year required")
        if self.max_authors < 1:
            raise InvalidSpec("max_authors must be at least 1")
        if not 0.0 <= self.zero_inflation < 1.0:
            raise InvalidSpec("zero_inflation must be in [0, 1)")
        if self.citation_noise_sd < 0:
            raise InvalidSpec("citation_noise_sd must be nonnegative")
        if (
            len(self.score_quantiles) != 3
            or not all(0.0 < q < 1.0 for q in self.score_quantiles)
            or list(self.score_quantiles) != sorted(self.score_quantiles)
        ):
            raise InvalidSpec(
                "score_quantiles must be three ascending cuts within (0, 1)"
            )


@dataclass
class SynthCorpus:
    corpus: Corpus
    scheme: ClassificationScheme
    units: list[UnitMembership]
    roster: dict[str, tuple[str, ...]]  # unit id -> author ids
    latent_quality: dict[str, float]
    spec: SynthCorpusSpec
    seed: int
    rng_algorithm: str = RNG_ALGORITHM


def synth_corpus(spec: SynthCorpusSpec, seed: int) -> SynthCorpus:
    """Generate a reproducible synthetic corpus with edges and scores.

    Units act as institutions with disjoint author pools; each article
    belongs to one unit, one field, and one of the field's journals.
    Citation counts are floor(lognormal) around a mean tied to latent
    quality, with field and year offsets that exercise normalisation, plus
    optional zero inflation.  Matching external citing documents are
    emitted as edges one to three years after publication.
    """
    rng = _rng(seed)
    unit_ids = [f"U{i:03d}" for i in range(spec.n_units)]
    field_codes = [f"F{i:02d}" for i in range(spec.n_fields)]
    journal_ids = [f"J{i:03d}" for i in range(spec.n_journals)]
    journal_field = {j: field_codes[i % spec.n_fields] for i, j in enumerate(journal_ids)}
    journals_by_field: dict[str, list[str]] = {}
    for j, f in journal_field.items():
        journals_by_field.setdefault(f, []).append(j)

    unit_quality = {
        u: float(q)
        for u, q in zip(unit_ids, rng.normal(0.0, spec.unit_quality_sd, spec.n_units))
    }
    pool_size = max(3, 2 * spec.max_authors)
    roster = {
        u: tuple(f"{u}-a{k:02d}" for k in range(pool_size)) for u in unit_ids
    }
    # fixed offsets so fields and years differ in raw citation rates
    field_offset = {f: 0.4 * i for i, f in enumerate(field_codes)}
    max_year = max(spec.years)
    year_offset = {y: 0.25 * (max_year - y) for y in spec.years}

    articles: list[Article] = []
    edges: list[CitationEdge] = []
    latent: dict[str, float] = {}
    unit_articles: dict[str, set[str]] = {u: set() for u in unit_ids}
    for i in range(spec.n_articles):
        article_id = f"A{i:05d}"
        unit = unit_ids[int(rng.integers(spec.n_units))]
        code = field_codes[int(rng.integers(spec.n_fields))]
        journal = journals_by_field[code][
            int(rng.integers(len(journals_by_field[code])))
        ]
        year = int(spec.years[int(rng.integers(len(spec.years)))])
        quality = unit_quality[unit] + float(rng.normal(0.0, spec.article_quality_sd))
        latent[article_id] = quality

        if spec.zero_inflation > 0 and rng.random() < spec.zero_inflation:
            count = 0
        else:
            mu = (
                spec.citation_base
                + spec.quality_citation_link * quality
                + field_offset[code]
                + year_offset[year]
                + math.log(float(spec.unit_citation_bias.get(unit, 1.0)))
            )
            count = int(math.floor(rng.lognormal(mu, spec.citation_noise_sd)))

        n_authors = int(rng.integers(1, spec.max_authors + 1))
        author_pool = roster[unit]
        positions = rng.choice(len(author_pool), size=n_authors, replace=False)
        authors = tuple(author_pool[int(p)] for p in positions)

        articles.append(
            Article(
                id=article_id,
                year=year,
                journal_id=journal,
                doc_type=DocType.ARTICLE,
                citations=count,
                fields=(code,),
                authors=authors,
                institutions=(unit,),
                countries=(),
                quality_score=None,  # assigned from quality quantiles below
            )
        )
        unit_articles[unit].add(article_id)
        for k in range(count):
            edges.append(
                CitationEdge(
                    citing_id=f"X{article_id}-{k:04d}",
                    citing_year=year + 1 + int(rng.integers(3)),
                    cited_id=article_id,
                )
            )

    # star scores from latent-quality quantiles: 1..4, ascending quality
    qualities = np.array([latent[a.id] for a in articles])
    cuts = np.quantile(qualities, spec.score_quantiles)
    scored = []
    for article in articles:
        stars = 1 + int(np.searchsorted(cuts, latent[article.id], side="right"))
        scored.append(dataclasses.replace(article, quality_score=stars))

    corpus = Corpus(scored, edges)
    scheme = ClassificationScheme(
        SchemeMode.JOURNAL_LEVEL,
        {j: (journal_field[j],) for j in journal_ids},
    )
    units = [
        UnitMembership(UnitKind.INSTITUTION, u, frozenset(unit_articles[u]))
        for u in unit_ids
        if unit_articles[u]
    ]
    return SynthCorpus(
        corpus=corpus,
        scheme=scheme,
        units=units,
        roster=roster,
        latent_quality=latent,
        spec=spec,
        seed=seed,
    )
