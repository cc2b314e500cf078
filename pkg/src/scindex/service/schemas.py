"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class IngestRequest(BaseModel):
    """Corpus upload: file contents inline, not paths, so the service can
    run anywhere."""

    articles_jsonl: str = Field(description="article records, one JSON object per line")
    edges_csv: str | None = Field(
        default=None, description="CSV citing_id,citing_year,cited_id"
    )
    scheme_csv: str | None = Field(
        default=None, description="CSV entity_id,field_code"
    )
    scheme_mode: str = "journal_level"


class ValidationIssueModel(BaseModel):
    code: str
    severity: str
    message: str
    row: int | None = None
    entity_id: str | None = None


class CorpusInfo(BaseModel):
    corpus_id: str
    n_articles: int
    n_edges: int
    min_year: int | None
    max_year: int | None
    n_errors: int
    n_warnings: int
    issues: list[ValidationIssueModel]


class ComputeRequest(BaseModel):
    indicator: str = "nlcs"
    window: int | None = None
    doc_types: list[str] = ["article", "review"]
    multi_field_mode: str = "arithmetic"
    include_self_citations: bool = True
    percentiles: list[float] = [1, 5, 10, 50]
    year: int | None = None
    jif_window: int = 2
    years: list[int] | None = None
    level: str = "article"
    by: str = "author"
    damping: float = 0.85


class IndicatorValue(BaseModel):
    id: str
    indicator: str
    value: float


class ComputeResponse(BaseModel):
    indicator: str
    values: list[IndicatorValue]
    note: str | None = None


class StatsRow(BaseModel):
    field: str
    year: int
    n: int
    mean_citations: float
    mean_log_citations: float


class StatsResponse(BaseModel):
    rows: list[StatsRow]


class AggregateRequest(BaseModel):
    by: str = "institution"
    credit: str = "full"
    window: int | None = None
    doc_types: list[str] = ["article", "review"]
    multi_field_mode: str = "arithmetic"
    include_self_citations: bool = True
    percentiles: list[float] = [1, 5, 10, 50]


class UnitAggregateModel(BaseModel):
    unit_id: str
    n_articles: int
    mncs: float
    mnlcs: float
    percentile_shares: dict[float, float]
    gpa: float | None = None
    funding_power_total: float | None = None
    funding_power_mean: float | None = None


class AggregateResponse(BaseModel):
    units: list[UnitAggregateModel]


class CorrelationRequest(BaseModel):
    x: list[float]
    y: list[float]
    method: str = "spearman"


class CorpusCorrelationRequest(BaseModel):
    x: str = "nlcs"
    y: str = "quality_score"
    method: str = "spearman"
    group_by: str = "none"
    window: int | None = None


class CorrelationModel(BaseModel):
    group: str = "all"
    method: str
    rho: float
    n: int
    ci_low: float
    ci_high: float
    band: str


class CorrelationResponse(BaseModel):
    results: list[CorrelationModel]


class GainRequest(BaseModel):
    """Substitute indicator-derived scores for a fraction of human ones and
    report per-unit funding-power gains."""

    by: str = "institution"
    indicator: str = "nlcs"
    replace_fraction: float = 0.5
    iterations: int = 10
    seed: int
    window: int | None = None
    funding_weights: dict[int, float] | None = None


class UnitGainModel(BaseModel):
    unit_id: str
    n: int
    gain_min: float
    gain_mean: float
    gain_max: float


class GainResponse(BaseModel):
    units: list[UnitGainModel]
    bias_vs_gpa: CorrelationModel | None = None


class AccuracyRequest(BaseModel):
    predicted: list[str | int]
    actual: list[str | int]


class AccuracyResponse(BaseModel):
    raw_accuracy: float
    baseline: float
    above_baseline: float


class CreditWeightsRequest(BaseModel):
    n_authors: int
    scheme: str = "fractional"


class CreditWeightsResponse(BaseModel):
    scheme: str
    weights: list[float]


class ProbModelRequest(BaseModel):
    q: float = 1.5
    sigma: float = 1.0
    n: int = 100
    trials: int = 10000
    seed: int


class ProbModelResponse(BaseModel):
    mean_of_means: float
    sd_of_means: float
    expected_sd: float
    rng: str
    seed: int


class WorkedExampleResponse(BaseModel):
    values: list[float]
    mean: float
    p_exact: float
    p_below_average: float
    p_overestimate: float
    p_underestimate: float


class LlmScoresRequest(BaseModel):
    """Repeated scores per article with optional year/field attributes."""

    scores: dict[str, list[float]]
    years: dict[str, int] = {}
    fields: dict[str, str] = {}
    normalize: str = "year-field"
    scale: dict | None = None


class LlmScoreRow(BaseModel):
    article_id: str
    k: int
    mean_score: float
    year_adjusted: float
    field_normalized: float | None = None
    predicted: int
    low_confidence: bool


class LlmScoresResponse(BaseModel):
    rows: list[LlmScoreRow]
