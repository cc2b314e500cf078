"""FastAPI service wrapping the computation engine.

Corpora are uploaded once, become immutable, and are then served to any
number of concurrent readers; every computation endpoint is a pure
function of a stored corpus and the request parameters.  The CLI covers
the same operations for one-shot batch use.
"""

from __future__ import annotations

import tempfile
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException

from .. import __version__, engine
from ..aggregate import unit_aggregate
from ..corpus import DocType, UnitKind, units_from_corpus
from ..credit import CreditKind, CreditScheme
from ..engine import ComputeOptions, CorpusBundle
from ..errors import ScindexError
from ..indicators import H_INDEX_CAVEAT, PercentileSpec
from ..llmscore import (
    RepeatedScores,
    ScoreScale,
    lookup_convert,
    mean_score,
    year_normalize,
)
from ..normalize import UNLIMITED_WINDOW, WindowSpec
from ..simulate import SimulationConfig, sample_mean_distribution, worked_example
from ..validate import pearson, spearman
from . import schemas


class CorpusStore:
    """In-memory registry of immutable corpora; writes are locked, reads
    are lock-free."""

    def __init__(self):
        self._bundles: dict[str, CorpusBundle] = {}
        self._lock = threading.Lock()

    def add(self, bundle: CorpusBundle) -> str:
        corpus_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._bundles[corpus_id] = bundle
        return corpus_id

    def get(self, corpus_id: str) -> CorpusBundle:
        try:
            return self._bundles[corpus_id]
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no corpus {corpus_id!r}")

    def remove(self, corpus_id: str) -> None:
        with self._lock:
            self._bundles.pop(corpus_id, None)

    def ids(self) -> list[str]:
        return list(self._bundles)


def _options(
    window: int | None,
    doc_types: list[str],
    multi_field_mode: str = "arithmetic",
    include_self_citations: bool = True,
) -> ComputeOptions:
    return ComputeOptions(
        window=WindowSpec(window) if window else UNLIMITED_WINDOW,
        doc_types=frozenset(DocType(d) for d in doc_types),
        multi_field_mode=multi_field_mode,
        include_self_citations=include_self_citations,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="scindex", version=__version__)
    store = CorpusStore()

    @app.exception_handler(ScindexError)
    async def _engine_error(request, exc: ScindexError):
        from fastapi.responses import JSONResponse

        return JSONResponse(
            status_code=422,
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def _value_error(request, exc: ValueError):
        from fastapi.responses import JSONResponse

        return JSONResponse(
            status_code=422,
            content={"error": "ValueError", "detail": str(exc)},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/corpora", response_model=schemas.CorpusInfo)
    def ingest(request: schemas.IngestRequest):
        with tempfile.TemporaryDirectory() as tmp:
            articles = Path(tmp) / "articles.jsonl"
            articles.write_text(request.articles_jsonl, encoding="utf-8")
            edges = scheme = None
            if request.edges_csv is not None:
                edges = Path(tmp) / "edges.csv"
                edges.write_text(request.edges_csv, encoding="utf-8")
            if request.scheme_csv is not None:
                scheme = Path(tmp) / "scheme.csv"
                scheme.write_text(request.scheme_csv, encoding="utf-8")
            bundle = engine.load_corpus_bundle(
                articles, edges, scheme, request.scheme_mode
            )
        corpus_id = store.add(bundle)
        return _corpus_info(corpus_id, bundle)

    def _corpus_info(corpus_id: str, bundle: CorpusBundle) -> schemas.CorpusInfo:
        report = bundle.report.to_dict()
        return schemas.CorpusInfo(
            corpus_id=corpus_id,
            n_articles=len(bundle.corpus),
            n_edges=len(bundle.corpus.edges),
            min_year=bundle.corpus.min_year,
            max_year=bundle.corpus.max_year,
            n_errors=report["n_errors"],
            n_warnings=report["n_warnings"],
            issues=[schemas.ValidationIssueModel(**i) for i in report["issues"]],
        )

    @app.get("/corpora")
    def list_corpora():
        return {"corpus_ids": store.ids()}

    @app.get("/corpora/{corpus_id}", response_model=schemas.CorpusInfo)
    def corpus_info(corpus_id: str):
        return _corpus_info(corpus_id, store.get(corpus_id))

    @app.delete("/corpora/{corpus_id}")
    def remove_corpus(corpus_id: str):
        store.remove(corpus_id)
        return {"removed": corpus_id}

    @app.get("/corpora/{corpus_id}/stats", response_model=schemas.StatsResponse)
    def stats(corpus_id: str, window: int | None = None):
        bundle = store.get(corpus_id)
        options = _options(window, ["article", "review"])
        rows = engine.export_stats_rows(bundle, options)
        return schemas.StatsResponse(
            rows=[
                schemas.StatsRow(
                    field=f, year=y, n=n, mean_citations=mc, mean_log_citations=ml
                )
                for f, y, n, mc, ml in rows
            ]
        )

    @app.post(
        "/corpora/{corpus_id}/indicators", response_model=schemas.ComputeResponse
    )
    def indicators(corpus_id: str, request: schemas.ComputeRequest):
        bundle = store.get(corpus_id)
        options = _options(
            request.window,
            request.doc_types,
            request.multi_field_mode,
            request.include_self_citations,
        )
        name = request.indicator.replace("-", "_")
        note = None
        values: list[schemas.IndicatorValue] = []
        if name in ("ncs", "nlcs", "citations"):
            table = engine.score_table(bundle, options, indicators=(name,))
            values = [
                schemas.IndicatorValue(id=aid, indicator=name, value=vals[name])
                for aid, vals in table.rows()
            ]
        elif name == "percentiles":
            spec = PercentileSpec(tuple(request.percentiles))
            flags = engine.percentile_table(bundle, options, spec)
            for aid, per_threshold in flags.items():
                for x, flag in per_threshold.items():
                    values.append(
                        schemas.IndicatorValue(
                            id=aid,
                            indicator=f"top_{x:g}",
                            value=1.0 if flag else 0.0,
                        )
                    )
        elif name in ("jif", "jmnlcs", "journal_mncs"):
            rows = engine.journal_indicator_rows(
                bundle,
                options,
                name,
                years=request.years,
                jif_year=request.year,
                jif_window=request.jif_window,
            )
            values = [
                schemas.IndicatorValue(id=journal, indicator=ind, value=value)
                for journal, ind, _, _, value in rows
            ]
        elif name == "pagerank":
            if request.level == "journal":
                rows = engine.journal_indicator_rows(
                    bundle, options, "pagerank", damping=request.damping
                )
                values = [
                    schemas.IndicatorValue(id=j, indicator="pagerank", value=v)
                    for j, _, _, _, v in rows
                ]
            else:
                values = [
                    schemas.IndicatorValue(id=aid, indicator="pagerank", value=v)
                    for aid, v in engine.article_pagerank_rows(
                        bundle, options, damping=request.damping
                    )
                ]
        elif name == "h_index":
            values = [
                schemas.IndicatorValue(id=uid, indicator="h_index", value=float(h))
                for uid, h in engine.h_index_rows(bundle, options, request.by)
            ]
            note = H_INDEX_CAVEAT
        else:
            raise HTTPException(status_code=422, detail=f"unknown indicator {name!r}")
        return schemas.ComputeResponse(indicator=name, values=values, note=note)

    @app.post(
        "/corpora/{corpus_id}/aggregates", response_model=schemas.AggregateResponse
    )
    def aggregates(corpus_id: str, request: schemas.AggregateRequest):
        bundle = store.get(corpus_id)
        options = _options(
            request.window,
            request.doc_types,
            request.multi_field_mode,
            request.include_self_citations,
        )
        stats_map = engine.reference_stats(bundle, options)
        table = engine.score_table(bundle, options, stats=stats_map)
        spec = PercentileSpec(tuple(request.percentiles))
        flags = engine.percentile_table(bundle, options, spec)
        credit = CreditScheme(CreditKind(request.credit.replace("-", "_")))
        units = engine.restrict_units(
            units_from_corpus(bundle.corpus, UnitKind(request.by)),
            table.column("ncs"),
        )
        out = []
        for unit in units:
            agg = unit_aggregate(
                unit,
                bundle.corpus,
                table.column("ncs"),
                table.column("nlcs"),
                flags=flags,
                credit_scheme=credit,
                unit_authors=(unit.unit_id,) if request.by == "author" else None,
            )
            out.append(
                schemas.UnitAggregateModel(
                    unit_id=agg.unit_id,
                    n_articles=agg.n_articles,
                    mncs=agg.mncs,
                    mnlcs=agg.mnlcs,
                    percentile_shares=dict(agg.percentile_shares),
                    gpa=agg.gpa,
                    funding_power_total=agg.funding_power_total,
                    funding_power_mean=agg.funding_power_mean,
                )
            )
        return schemas.AggregateResponse(units=out)

    @app.post("/corpora/{corpus_id}/gain", response_model=schemas.GainResponse)
    def gain(corpus_id: str, request: schemas.GainRequest):
        from collections import Counter

        from ..aggregate import (
            QuotaAllocation,
            bias_correlation,
            quota_assign,
            score_gain,
        )
        from ..errors import MissingValue

        bundle = store.get(corpus_id)
        options = _options(request.window, ["article", "review"])
        table = engine.score_table(bundle, options)
        indicator_values = table.column(request.indicator)
        units = engine.restrict_units(
            units_from_corpus(bundle.corpus, UnitKind(request.by)),
            indicator_values,
        )
        human = {
            a.id: a.quality_score
            for a in bundle.corpus
            if a.quality_score is not None
        }
        covered = sorted({i for u in units for i in u.article_ids})
        unscored = [i for i in covered if i not in human]
        if unscored:
            raise MissingValue("articles lack quality scores", ids=unscored)
        quota = Counter(human[i] for i in covered)
        predicted = dict(
            zip(
                covered,
                quota_assign(
                    [indicator_values[i] for i in covered],
                    QuotaAllocation(dict(quota), seed=request.seed),
                ),
            )
        )
        gains = score_gain(
            units,
            human,
            predicted,
            request.replace_fraction,
            request.seed,
            request.iterations,
            funding_weights=request.funding_weights,
        )
        bias = None
        if len(units) >= 4:
            gain_map = {g.unit_id: g.gain_mean for g in gains}
            gpa = {
                u.unit_id: sum(human[i] for i in u.article_ids) / len(u.article_ids)
                for u in units
            }
            try:
                r = bias_correlation(gain_map, gpa)
                bias = schemas.CorrelationModel(
                    group="gpa", method=r.method, rho=r.rho, n=r.n,
                    ci_low=r.ci_low, ci_high=r.ci_high, band=r.band,
                )
            except ScindexError:
                bias = None
        return schemas.GainResponse(
            units=[
                schemas.UnitGainModel(
                    unit_id=g.unit_id, n=g.n_articles, gain_min=g.gain_min,
                    gain_mean=g.gain_mean, gain_max=g.gain_max,
                )
                for g in gains
            ],
            bias_vs_gpa=bias,
        )

    @app.post("/correlate", response_model=schemas.CorrelationModel)
    def correlate(request: schemas.CorrelationRequest):
        fn = spearman if request.method == "spearman" else pearson
        result = fn(request.x, request.y)
        return schemas.CorrelationModel(
            method=result.method,
            rho=result.rho,
            n=result.n,
            ci_low=result.ci_low,
            ci_high=result.ci_high,
            band=result.band,
        )

    @app.post(
        "/corpora/{corpus_id}/correlation",
        response_model=schemas.CorrelationResponse,
    )
    def corpus_correlation(corpus_id: str, request: schemas.CorpusCorrelationRequest):
        bundle = store.get(corpus_id)
        options = _options(request.window, ["article", "review"])
        table = engine.score_table(bundle, options)

        x_values = engine.article_values(bundle, options, table, request.x)
        y_values = engine.article_values(bundle, options, table, request.y)
        shared = [
            i for i in bundle.corpus.ids() if i in x_values and i in y_values
        ]
        groups: dict[str, list[str]] = {}
        if request.group_by == "none":
            groups["all"] = shared
        elif request.group_by == "year":
            for i in shared:
                groups.setdefault(str(bundle.corpus.get(i).year), []).append(i)
        elif request.group_by == "journal":
            for i in shared:
                groups.setdefault(bundle.corpus.get(i).journal_id, []).append(i)
        elif request.group_by == "field":
            from ..corpus import resolve_fields

            for i in shared:
                for code in resolve_fields(bundle.corpus.get(i), bundle.scheme):
                    groups.setdefault(code, []).append(i)
        else:
            raise HTTPException(status_code=422, detail="unknown group_by")
        fn = spearman if request.method == "spearman" else pearson
        results = []
        for group in sorted(groups):
            ids = groups[group]
            try:
                r = fn([x_values[i] for i in ids], [y_values[i] for i in ids])
            except ScindexError:
                continue
            results.append(
                schemas.CorrelationModel(
                    group=group, method=r.method, rho=r.rho, n=r.n,
                    ci_low=r.ci_low, ci_high=r.ci_high, band=r.band,
                )
            )
        return schemas.CorrelationResponse(results=results)

    @app.post("/accuracy", response_model=schemas.AccuracyResponse)
    def accuracy(request: schemas.AccuracyRequest):
        from ..validate import accuracy_above_baseline

        raw, baseline, above = accuracy_above_baseline(
            request.predicted, request.actual
        )
        return schemas.AccuracyResponse(
            raw_accuracy=raw, baseline=baseline, above_baseline=above
        )

    @app.post("/credit/weights", response_model=schemas.CreditWeightsResponse)
    def credit_weights(request: schemas.CreditWeightsRequest):
        from ..credit import weights

        scheme = CreditScheme(CreditKind(request.scheme.replace("-", "_")))
        return schemas.CreditWeightsResponse(
            scheme=scheme.kind.value,
            weights=weights(request.n_authors, scheme),
        )

    @app.get("/simulate/worked", response_model=schemas.WorkedExampleResponse)
    def simulate_worked():
        return schemas.WorkedExampleResponse(**worked_example().as_dict())

    @app.post("/simulate/probmodel", response_model=schemas.ProbModelResponse)
    def simulate_probmodel(request: schemas.ProbModelRequest):
        result = sample_mean_distribution(
            SimulationConfig(
                q=request.q,
                sigma=request.sigma,
                n=request.n,
                trials=request.trials,
                seed=request.seed,
            )
        )
        return schemas.ProbModelResponse(
            mean_of_means=result.mean_of_means,
            sd_of_means=result.sd_of_means,
            expected_sd=result.expected_sd,
            rng=result.rng_algorithm,
            seed=request.seed,
        )

    @app.post("/llm/scores", response_model=schemas.LlmScoresResponse)
    def llm_scores(request: schemas.LlmScoresRequest):
        scale = (
            ScoreScale.from_dict(request.scale)
            if request.scale
            else ScoreScale.load_default()
        )
        records = {
            aid: RepeatedScores(aid, tuple(scores))
            for aid, scores in request.scores.items()
        }
        means = {aid: mean_score(rs) for aid, rs in records.items()}
        year_adjusted = dict(means)
        if request.normalize in ("year", "year-field", "field-year") and request.years:
            by_year: dict[int, list[str]] = {}
            for aid, year in request.years.items():
                if aid in means:
                    by_year.setdefault(year, []).append(aid)
            grouped = {y: [means[a] for a in ids] for y, ids in by_year.items()}
            _, offsets = year_normalize(grouped)
            for year, ids in by_year.items():
                for aid in ids:
                    year_adjusted[aid] = means[aid] + offsets[year]
        field_normalized: dict[str, float] = {}
        if request.normalize in ("field", "year-field", "field-year") and request.fields:
            base = year_adjusted if request.normalize == "year-field" else means
            by_field: dict[str, list[str]] = {}
            for aid, code in request.fields.items():
                if aid in means:
                    by_field.setdefault(code, []).append(aid)
            for code, ids in by_field.items():
                fmean = sum(base[a] for a in ids) / len(ids)
                for aid in ids:
                    field_normalized[aid] = base[aid] / fmean if fmean > 0 else 0.0
        lo, hi = scale.domain
        rows = [
            schemas.LlmScoreRow(
                article_id=aid,
                k=records[aid].k,
                mean_score=means[aid],
                year_adjusted=year_adjusted[aid],
                field_normalized=field_normalized.get(aid),
                predicted=lookup_convert(
                    min(max(year_adjusted[aid], lo), hi), scale
                ),
                low_confidence=records[aid].low_confidence,
            )
            for aid in sorted(records)
        ]
        return schemas.LlmScoresResponse(rows=rows)

    return app


app = create_app()
