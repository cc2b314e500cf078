"""Command-line entry point.

Subcommands: ingest, compute, aggregate, correlate, features, simulate,
llm, export, serve.  A JSON config file (``--config`` or the
``SCINDEX_CONFIG`` environment variable) supplies defaults; flags override
config.  Exit codes: 0 success, 1 validation errors (with a JSON error
report on stdout), 2 usage errors.  Every randomised command requires
``--seed`` and identical inputs, flags, and seed give byte-identical
artifacts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__, engine
from .aggregate import (
    DEFAULT_GAIN_ITERATIONS,
    QuotaAllocation,
    quota_assign,
    score_gain,
    unit_aggregate,
)
from .corpus import DocType, ValidationReport
from .credit import CreditKind, CreditScheme
from .engine import ComputeOptions, CorpusBundle, config_hash, write_csv, write_json
from .errors import ScindexError
from .features import FEATURE_NAMES, FeatureBuilder
from .indicators import H_INDEX_CAVEAT, PercentileSpec
from .llmscore import (
    RepeatedScores,
    ScoreScale,
    lookup_convert,
    mean_score,
    year_normalize,
)
from .normalize import UNLIMITED_WINDOW, WindowSpec
from .simulate import (
    SimulationConfig,
    SynthCorpusSpec,
    sample_mean_distribution,
    synth_corpus,
    worked_example,
)
from .validate import pearson, spearman

CREDIT_CHOICES = ("full", "fractional", "arithmetic", "geometric", "harmonic", "u-shaped")


class _Args:
    """Resolved view over parsed flags with config-file fallback."""

    def __init__(self, namespace: argparse.Namespace, config: dict):
        self._ns = namespace
        self._config = config

    def get(self, name: str, default=None):
        value = getattr(self._ns, name, None)
        if value is not None:
            return value
        return self._config.get(name, default)

    def require(self, parser: argparse.ArgumentParser, name: str):
        value = self.get(name)
        if value is None:
            parser.error(f"--{name.replace('_', '-')} is required")
        return value


def _load_config(namespace: argparse.Namespace) -> dict:
    path = getattr(namespace, "config", None) or os.environ.get("SCINDEX_CONFIG")
    if not path:
        return {}
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _funding_weights(args: _Args):
    raw = args.get("funding_weights")
    if raw is None:
        return None
    return {int(k): float(v) for k, v in raw.items()}


def _compute_options(args: _Args) -> ComputeOptions:
    window_years = args.get("window")
    window = (
        WindowSpec(int(window_years))
        if window_years not in (None, 0, "0")
        else UNLIMITED_WINDOW
    )
    doc_types = args.get("doc_types", "article,review")
    if isinstance(doc_types, str):
        doc_types = [d.strip() for d in doc_types.split(",") if d.strip()]
    return ComputeOptions(
        window=window,
        doc_types=frozenset(DocType(d) for d in doc_types),
        multi_field_mode=args.get("multi_field_mode", "arithmetic"),
        include_self_citations=not bool(args.get("exclude_self_citations", False)),
    )


def _load_bundle(args: _Args, parser) -> CorpusBundle:
    articles = args.require(parser, "articles")
    return engine.load_corpus_bundle(
        articles,
        edges_path=args.get("edges"),
        scheme_path=args.get("scheme"),
        scheme_mode=args.get("scheme_mode", "journal_level"),
    )


def _settings_hash(args: _Args, subcommand: str, **extra) -> str:
    """Hash of computation-relevant settings; paths excluded so reruns in
    different directories produce identical artifacts."""
    settings = {
        "command": subcommand,
        "window": args.get("window"),
        "doc_types": args.get("doc_types", "article,review"),
        "multi_field_mode": args.get("multi_field_mode", "arithmetic"),
        "exclude_self_citations": bool(args.get("exclude_self_citations", False)),
    }
    settings.update(extra)
    return config_hash(settings)


def _fail(report: ValidationReport) -> int:
    print(json.dumps({"status": "error", "report": report.to_dict()}, indent=2))
    return 1


def _warn(report: ValidationReport) -> None:
    if report.issues:
        print(
            json.dumps({"status": "warnings", "report": report.to_dict()}),
            file=sys.stderr,
        )


# --- subcommand handlers --------------------------------------------------


def _cmd_ingest(args: _Args, parser) -> int:
    out_dir = Path(args.require(parser, "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle = _load_bundle(args, parser)
    cfg = _settings_hash(args, "ingest")
    n_edges = len(bundle.corpus.edges)
    write_json(
        out_dir / "validation_report.json",
        {"report": bundle.report.to_dict()},
        cfg,
    )
    write_json(
        out_dir / "corpus_summary.json",
        {
            "n_articles": len(bundle.corpus),
            "n_edges": n_edges,
            "min_year": bundle.corpus.min_year,
            "max_year": bundle.corpus.max_year,
        },
        cfg,
    )
    if bundle.report.errors:
        return _fail(bundle.report)
    _warn(bundle.report)
    return 0


def _cmd_compute(args: _Args, parser) -> int:
    indicator = args.require(parser, "indicator").replace("-", "_")
    out = args.require(parser, "out")
    bundle = _load_bundle(args, parser)
    if bundle.report.errors:
        return _fail(bundle.report)
    _warn(bundle.report)
    options = _compute_options(args)
    cfg = _settings_hash(args, "compute", indicator=indicator)

    if indicator in ("ncs", "nlcs", "citations"):
        table = engine.score_table(bundle, options, indicators=(indicator,))
        rows = [(aid, vals[indicator]) for aid, vals in table.rows()]
        write_csv(out, ("article_id", indicator), rows, cfg)
        return 0
    if indicator == "percentiles":
        spec = _percentile_spec(args, parser)
        flags = engine.percentile_table(bundle, options, spec)
        header = ["article_id"] + [f"top_{_fmt_threshold(x)}" for x in spec.thresholds]
        rows = [
            [aid] + [flags[aid][x] for x in spec.thresholds]
            for aid in bundle.corpus.ids()
            if aid in flags
        ]
        write_csv(out, header, rows, cfg)
        return 0
    if indicator in ("jif", "jmnlcs", "journal_mncs"):
        if indicator == "jif" and args.get("year") is None:
            parser.error("--year is required for jif")
        years = args.get("years")
        if isinstance(years, str):
            years = [int(y) for y in years.split(",") if y.strip()]
        rows = engine.journal_indicator_rows(
            bundle,
            options,
            indicator,
            years=years,
            jif_year=_maybe_int(args.get("year")),
            jif_window=int(args.get("jif_window", 2)),
        )
        write_csv(out, ("journal_id", "indicator", "year", "window", "value"), rows, cfg)
        return 0
    if indicator == "pagerank":
        level = args.get("level", "article")
        damping = float(args.get("damping", 0.85))
        if level == "journal":
            rows = engine.journal_indicator_rows(
                bundle, options, "pagerank", damping=damping
            )
            write_csv(
                out, ("journal_id", "indicator", "year", "window", "value"), rows, cfg
            )
        else:
            rows = engine.article_pagerank_rows(bundle, options, damping=damping)
            write_csv(out, ("article_id", "pagerank"), rows, cfg)
        return 0
    if indicator == "h_index":
        by = args.get("by", "author")
        rows = engine.h_index_rows(bundle, options, by)
        lines = [f"# note: {H_INDEX_CAVEAT}"]
        header = (f"{by}_id", "h_index")
        path = Path(out)
        write_csv(path, header, rows, cfg)
        content = path.read_text(encoding="utf-8").splitlines()
        path.write_text(
            "\n".join([content[0]] + lines + content[1:]) + "\n", encoding="utf-8"
        )
        return 0
    parser.error(f"unknown indicator {indicator!r}")
    return 2


def _percentile_spec(args: _Args, parser) -> PercentileSpec:
    raw = str(args.get("percentiles", "1,5,10,50"))
    try:
        return PercentileSpec(tuple(float(x) for x in raw.split(",")))
    except ValueError as exc:
        parser.error(f"bad --percentiles {raw!r}: {exc}")


def _fmt_threshold(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else str(x).replace(".", "_")


def _maybe_int(value):
    return None if value is None else int(value)


def _cmd_aggregate(args: _Args, parser) -> int:
    out = args.require(parser, "out")
    bundle = _load_bundle(args, parser)
    if bundle.report.errors:
        return _fail(bundle.report)
    _warn(bundle.report)
    options = _compute_options(args)
    units, unit_report = engine.load_units(
        bundle.corpus, args.get("by"), args.get("units")
    )
    if unit_report.errors:
        return _fail(unit_report)
    credit = CreditScheme(CreditKind(str(args.get("credit", "full")).replace("-", "_")))
    roster = engine.load_roster(args.get("roster")) if args.get("roster") else {}

    stats = engine.reference_stats(bundle, options)
    table = engine.score_table(bundle, options, stats=stats)
    ncs_values = table.column("ncs")
    nlcs_values = table.column("nlcs")
    units = engine.restrict_units(units, ncs_values)

    if args.get("gain"):
        seed = args.get("seed")
        if seed is None:
            parser.error("--seed is required for --gain (randomised replacement)")
        fraction = float(args.get("replace_fraction", 0.5))
        iterations = int(args.get("iterations", DEFAULT_GAIN_ITERATIONS))
        cfg = _settings_hash(
            args, "aggregate-gain", fraction=fraction, iterations=iterations,
            seed=int(seed), credit=credit.kind.value,
        )
        human = {
            a.id: a.quality_score
            for a in bundle.corpus
            if a.quality_score is not None
        }
        covered = sorted({i for u in units for i in u.article_ids})
        unscored = [i for i in covered if i not in human]
        if unscored:
            report = ValidationReport()
            report.add(
                "MissingValue",
                "articles lack quality scores needed for --gain: "
                + ", ".join(unscored),
            )
            return _fail(report)
        quota_sizes: dict[int, int] = {}
        for i in covered:
            quota_sizes[human[i]] = quota_sizes.get(human[i], 0) + 1
        indicator_values = [nlcs_values[i] for i in covered]
        predicted_list = quota_assign(
            indicator_values, QuotaAllocation(quota_sizes, seed=int(seed))
        )
        predicted = dict(zip(covered, predicted_list))
        gains = score_gain(
            units, human, predicted, fraction, int(seed), iterations,
            funding_weights=_funding_weights(args),
        )
        write_csv(
            out,
            ("unit_id", "n", "gain_min", "gain_mean", "gain_max"),
            [
                (g.unit_id, g.n_articles, g.gain_min, g.gain_mean, g.gain_max)
                for g in gains
            ],
            cfg,
            seed=int(seed),
        )
        return 0

    spec = _percentile_spec(args, parser)
    flags = engine.percentile_table(bundle, options, spec)
    cfg = _settings_hash(args, "aggregate", credit=credit.kind.value)
    rows = []
    for unit in units:
        agg = unit_aggregate(
            unit,
            bundle.corpus,
            ncs_values,
            nlcs_values,
            flags=flags,
            credit_scheme=credit,
            unit_authors=roster.get(unit.unit_id)
            or ((unit.unit_id,) if args.get("by") == "author" else None),
            funding_weights=_funding_weights(args),
        )
        rows.append(
            [agg.unit_id, agg.n_articles, agg.mncs, agg.mnlcs]
            + [agg.percentile_shares.get(x, 0.0) for x in spec.thresholds]
            + [
                "" if agg.gpa is None else agg.gpa,
                "" if agg.funding_power_total is None else agg.funding_power_total,
                "" if agg.funding_power_mean is None else agg.funding_power_mean,
            ]
        )
    header = (
        ["unit_id", "n", "mncs", "mnlcs"]
        + [f"share_top_{_fmt_threshold(x)}" for x in spec.thresholds]
        + ["gpa", "funding_power_total", "funding_power_mean"]
    )
    write_csv(out, header, rows, cfg)
    return 0


def _cmd_correlate(args: _Args, parser) -> int:
    out = args.require(parser, "out")
    x_name = args.require(parser, "x")
    y_name = args.require(parser, "y")
    method = args.get("method", "spearman")
    group_by = args.get("group_by", "none")
    bundle = _load_bundle(args, parser)
    if bundle.report.errors:
        return _fail(bundle.report)
    _warn(bundle.report)
    options = _compute_options(args)
    table = engine.score_table(bundle, options)
    x_values = engine.article_values(bundle, options, table, x_name)
    y_values = engine.article_values(bundle, options, table, y_name)
    shared = [i for i in bundle.corpus.ids() if i in x_values and i in y_values]

    groups: dict[str, list[str]] = {}
    if group_by == "none":
        groups["all"] = shared
    else:
        for article_id in shared:
            article = bundle.corpus.get(article_id)
            if group_by == "field":
                from .corpus import resolve_fields

                for code in resolve_fields(article, bundle.scheme):
                    groups.setdefault(code, []).append(article_id)
            elif group_by == "year":
                groups.setdefault(str(article.year), []).append(article_id)
            elif group_by == "journal":
                groups.setdefault(article.journal_id, []).append(article_id)
            else:
                parser.error(f"unknown group-by {group_by!r}")

    corr = spearman if method == "spearman" else pearson
    rows = []
    skipped = []
    for group in sorted(groups):
        ids = groups[group]
        try:
            result = corr(
                [x_values[i] for i in ids], [y_values[i] for i in ids]
            )
        except ScindexError as exc:
            skipped.append({"group": group, "reason": str(exc)})
            continue
        rows.append(
            (group, result.method, result.n, result.rho, result.ci_low,
             result.ci_high, result.band)
        )
    cfg = _settings_hash(
        args, "correlate", x=x_name, y=y_name, method=method, group_by=group_by
    )
    write_csv(
        out, ("group", "method", "n", "rho", "ci_low", "ci_high", "band"), rows, cfg
    )
    if skipped:
        print(json.dumps({"status": "warnings", "skipped_groups": skipped}),
              file=sys.stderr)
    return 0


def _cmd_features(args: _Args, parser) -> int:
    out = args.require(parser, "out")
    bundle = _load_bundle(args, parser)
    if bundle.report.errors:
        return _fail(bundle.report)
    _warn(bundle.report)
    options = _compute_options(args)
    stats = engine.reference_stats(bundle, options)
    builder = FeatureBuilder(
        bundle.corpus,
        stats,
        bundle.scheme,
        options.multi_field_mode,
        options.doc_types,
        options.window,
        options.include_self_citations,
        reference_year=_maybe_int(args.get("reference_year")),
    )
    rows = []
    skipped = []
    for article in engine.qualifying_articles(bundle.corpus, options):
        try:
            vector = builder.vector(article)
        except ScindexError as exc:
            skipped.append({"article_id": article.id, "reason": str(exc)})
            continue
        rows.append([article.id] + [getattr(vector, name) for name in FEATURE_NAMES])
    cfg = _settings_hash(args, "features")
    write_csv(out, ["article_id"] + list(FEATURE_NAMES), rows, cfg)
    if skipped:
        print(json.dumps({"status": "warnings", "skipped_articles": skipped}),
              file=sys.stderr)
    if not rows:
        report = ValidationReport()
        for s in skipped:
            report.add("FeatureUnavailable", f"{s['article_id']}: {s['reason']}")
        return _fail(report)
    return 0


def _cmd_simulate(args: _Args, parser) -> int:
    mode = args.get("mode")
    if mode == "worked":
        out = args.require(parser, "out")
        cfg = _settings_hash(args, "simulate-worked")
        write_json(Path(out), worked_example().as_dict(), cfg)
        return 0
    if mode == "probmodel":
        out = args.require(parser, "out")
        seed = int(args.require(parser, "seed"))
        config = SimulationConfig(
            q=float(args.get("q", 1.5)),
            sigma=float(args.get("sigma", 1.0)),
            n=int(args.get("n", 100)),
            trials=int(args.get("trials", 10000)),
            seed=seed,
        )
        cfg = _settings_hash(
            args, "simulate-probmodel", q=config.q, sigma=config.sigma,
            n=config.n, trials=config.trials, seed=seed,
        )
        write_json(Path(out), sample_mean_distribution(config).as_dict(), cfg, seed=seed)
        return 0
    if mode == "corpus":
        out_dir = Path(args.require(parser, "out"))
        seed = int(args.require(parser, "seed"))
        spec_path = args.get("spec")
        spec_dict = {}
        if spec_path:
            with open(spec_path, encoding="utf-8") as fh:
                spec_dict = json.load(fh)
        if "years" in spec_dict:
            spec_dict["years"] = tuple(spec_dict["years"])
        if "score_quantiles" in spec_dict:
            spec_dict["score_quantiles"] = tuple(spec_dict["score_quantiles"])
        spec = SynthCorpusSpec(**spec_dict)
        result = synth_corpus(spec, seed)
        cfg = _settings_hash(args, "simulate-corpus", seed=seed, spec=spec_dict)
        _write_synth_corpus(result, out_dir, cfg, seed)
        return 0
    parser.error("simulate needs a mode: worked | probmodel | corpus")
    return 2


def _write_synth_corpus(result, out_dir: Path, cfg: str, seed: int) -> None:
    from .engine import output_header

    out_dir.mkdir(parents=True, exist_ok=True)
    lines = [output_header(cfg, seed)]
    for article in result.corpus:
        lines.append(
            json.dumps(
                {
                    "id": article.id,
                    "year": article.year,
                    "journal_id": article.journal_id,
                    "doc_type": article.doc_type.value,
                    "citations": article.citations,
                    "fields": list(article.fields),
                    "authors": list(article.authors),
                    "institutions": list(article.institutions),
                    "countries": list(article.countries),
                    "quality_score": article.quality_score,
                },
                sort_keys=True,
            )
        )
    (out_dir / "articles.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")

    write_csv(
        out_dir / "edges.csv",
        ("citing_id", "citing_year", "cited_id"),
        [(e.citing_id, e.citing_year, e.cited_id) for e in result.corpus.edges],
        cfg,
        seed=seed,
    )
    write_csv(
        out_dir / "scheme.csv",
        ("entity_id", "field_code"),
        [
            (journal, code)
            for journal, codes in sorted(result.scheme.assignments.items())
            for code in codes
        ],
        cfg,
        seed=seed,
    )
    write_csv(
        out_dir / "units.csv",
        ("unit_kind", "unit_id", "article_id"),
        [
            (u.unit_kind.value, u.unit_id, article_id)
            for u in result.units
            for article_id in sorted(u.article_ids)
        ],
        cfg,
        seed=seed,
    )
    write_csv(
        out_dir / "roster.csv",
        ("unit_id", "author_id"),
        [
            (unit_id, author)
            for unit_id, authors in sorted(result.roster.items())
            for author in authors
        ],
        cfg,
        seed=seed,
    )
    write_csv(
        out_dir / "latent_quality.csv",
        ("article_id", "latent_quality"),
        sorted(result.latent_quality.items()),
        cfg,
        seed=seed,
    )
    write_json(
        out_dir / "generator.json",
        {"rng": result.rng_algorithm, "seed": seed},
        cfg,
        seed=seed,
    )


def _cmd_llm(args: _Args, parser) -> int:
    import csv as _csv

    out = args.require(parser, "out")
    scores_path = args.require(parser, "scores")
    scale = (
        ScoreScale.from_json(args.get("scale"))
        if args.get("scale")
        else ScoreScale.load_default()
    )
    normalize = args.get("normalize", "year-field")

    per_article: dict[str, list[float]] = {}
    meta: dict[str, tuple[int | None, str | None]] = {}
    with open(scores_path, newline="", encoding="utf-8") as fh:
        reader = _csv.DictReader(line for line in fh if not line.startswith("#"))
        needed = {"article_id", "repetition", "score"}
        if reader.fieldnames is None or not needed.issubset(reader.fieldnames):
            parser.error("scores file needs columns article_id,repetition,score")
        for row in reader:
            aid = row["article_id"].strip()
            per_article.setdefault(aid, []).append(float(row["score"]))
            year = int(row["year"]) if row.get("year") else None
            field = row.get("field") or None
            meta.setdefault(aid, (year, field))

    records = {
        aid: RepeatedScores(aid, tuple(scores))
        for aid, scores in per_article.items()
    }
    means = {aid: mean_score(rs) for aid, rs in records.items()}

    year_adjusted = dict(means)
    if normalize in ("year", "year-field", "field-year"):
        by_year: dict[int, list[str]] = {}
        for aid, (year, _) in meta.items():
            if year is not None:
                by_year.setdefault(year, []).append(aid)
        if by_year:
            grouped = {y: [means[a] for a in ids] for y, ids in by_year.items()}
            _, offsets = year_normalize(grouped)
            for year, ids in by_year.items():
                for aid in ids:
                    year_adjusted[aid] = means[aid] + offsets[year]

    field_normalized: dict[str, float] = {}
    if normalize in ("field", "year-field", "field-year"):
        base = year_adjusted if normalize == "year-field" else means
        by_field: dict[str, list[str]] = {}
        for aid, (_, field) in meta.items():
            if field is not None:
                by_field.setdefault(field, []).append(aid)
        for field, ids in by_field.items():
            fmean = sum(base[a] for a in ids) / len(ids)
            for aid in ids:
                field_normalized[aid] = base[aid] / fmean if fmean > 0 else 0.0

    lo, hi = scale.domain
    rows = []
    for aid in sorted(records):
        adjusted = year_adjusted[aid]
        clamped = min(max(adjusted, lo), hi)
        rows.append(
            (
                aid,
                records[aid].k,
                means[aid],
                adjusted,
                field_normalized.get(aid, ""),
                lookup_convert(clamped, scale),
                records[aid].low_confidence,
            )
        )
    cfg = _settings_hash(args, "llm", normalize=normalize)
    write_csv(
        out,
        (
            "article_id",
            "k",
            "mean_score",
            "year_adjusted",
            "field_normalized",
            "predicted",
            "low_confidence",
        ),
        rows,
        cfg,
    )
    return 0


def _cmd_export(args: _Args, parser) -> int:
    out = args.require(parser, "out")
    if args.get("plot_data"):
        source = args.require(parser, "from_file")
        rows = engine.tidy_rows(source)
        cfg = _settings_hash(args, "export-plot-data")
        write_csv(out, ("id", "variable", "value"), rows, cfg)
        return 0
    bundle = _load_bundle(args, parser)
    if bundle.report.errors:
        return _fail(bundle.report)
    _warn(bundle.report)
    options = _compute_options(args)
    rows = engine.export_stats_rows(bundle, options)
    cfg = _settings_hash(args, "export-stats")
    write_csv(
        out,
        ("field", "year", "n", "mean_citations", "mean_log_citations"),
        rows,
        cfg,
    )
    return 0


def _cmd_serve(args: _Args, parser) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(
        create_app(),
        host=str(args.get("host", "127.0.0.1")),
        port=int(args.get("port", 8000)),
    )
    return 0


# --- parser ------------------------------------------------------------------


def _add_corpus_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--articles", help="articles JSONL or CSV file")
    sub.add_argument("--edges", help="citation edge CSV file")
    sub.add_argument("--scheme", help="classification scheme CSV file")
    sub.add_argument(
        "--scheme-mode", dest="scheme_mode",
        choices=("journal_level", "article_level"),
    )
    sub.add_argument("--window", type=int, help="citation window in years (0 = unlimited)")
    sub.add_argument("--doc-types", dest="doc_types",
                     help="comma list of reference document types")
    sub.add_argument(
        "--multi-field-mode", dest="multi_field_mode",
        choices=("arithmetic", "harmonic"),
    )
    sub.add_argument(
        "--exclude-self-citations", dest="exclude_self_citations",
        action="store_const", const=True,
    )
    sub.add_argument("--config", help="JSON config file (flags override)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scindex",
        description="scientometrics computation engine",
    )
    parser.add_argument("--version", action="version", version=f"scindex {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("ingest", help="validate and summarise a corpus")
    _add_corpus_flags(p)
    p.add_argument("--out", help="output directory")
    p.set_defaults(handler=_cmd_ingest)

    p = commands.add_parser("compute", help="compute an indicator table")
    _add_corpus_flags(p)
    p.add_argument("--indicator", help="ncs|nlcs|citations|percentiles|jif|jmnlcs|journal-mncs|pagerank|h-index")
    p.add_argument("--percentiles", help="comma list of top-X thresholds")
    p.add_argument("--year", help="census year for jif")
    p.add_argument("--jif-window", dest="jif_window", help="jif window in years")
    p.add_argument("--years", help="comma list of years for journal means")
    p.add_argument("--level", choices=("article", "journal"), help="pagerank level")
    p.add_argument("--by", choices=("author", "journal", "institution", "country"),
                   help="h-index grouping")
    p.add_argument("--damping", help="pagerank damping factor")
    p.add_argument("--out", help="output CSV")
    p.set_defaults(handler=_cmd_compute)

    p = commands.add_parser("aggregate", help="unit-level rollups and gains")
    _add_corpus_flags(p)
    p.add_argument("--by", choices=("author", "journal", "institution", "country"))
    p.add_argument("--units", help="unit membership CSV")
    p.add_argument("--roster", help="unit author roster CSV")
    p.add_argument("--credit", choices=CREDIT_CHOICES)
    p.add_argument("--percentiles", help="comma list of top-X thresholds")
    p.add_argument("--gain", action="store_const", const=True,
                   help="compute score-substitution gains")
    p.add_argument("--replace-fraction", dest="replace_fraction")
    p.add_argument("--iterations")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output CSV")
    p.set_defaults(handler=_cmd_aggregate)

    p = commands.add_parser("correlate", help="correlate two per-article values")
    _add_corpus_flags(p)
    p.add_argument("--x", help="first value name")
    p.add_argument("--y", help="second value name")
    p.add_argument("--method", choices=("spearman", "pearson"))
    p.add_argument("--group-by", dest="group_by",
                   choices=("none", "field", "year", "journal"))
    p.add_argument("--out", help="output CSV")
    p.set_defaults(handler=_cmd_correlate)

    p = commands.add_parser("features", help="per-article ML feature vectors")
    _add_corpus_flags(p)
    p.add_argument("--reference-year", dest="reference_year")
    p.add_argument("--out", help="output CSV")
    p.set_defaults(handler=_cmd_features)

    p = commands.add_parser("simulate", help="probability model and synthetic corpora")
    sim = p.add_subparsers(dest="mode")
    w = sim.add_parser("worked", help="fixed worked probability example")
    w.add_argument("--out")
    w.add_argument("--config")
    w.set_defaults(handler=_cmd_simulate)
    pm = sim.add_parser("probmodel", help="sampling distribution of the mean")
    pm.add_argument("--q", help="true quality mean")
    pm.add_argument("--sigma", help="indicator noise SD")
    pm.add_argument("--n", help="sample size")
    pm.add_argument("--trials", help="number of trials")
    pm.add_argument("--seed", type=int, required=True)
    pm.add_argument("--out")
    pm.add_argument("--config")
    pm.set_defaults(handler=_cmd_simulate)
    sc = sim.add_parser("corpus", help="generate a synthetic corpus")
    sc.add_argument("--spec", help="JSON generator spec")
    sc.add_argument("--seed", type=int, required=True)
    sc.add_argument("--out", help="output directory")
    sc.add_argument("--config")
    sc.set_defaults(handler=_cmd_simulate)
    p.set_defaults(handler=_cmd_simulate)

    p = commands.add_parser("llm", help="post-process repeated LLM quality scores")
    p.add_argument("--scores", help="CSV article_id,repetition,score,year,field")
    p.add_argument("--scale", help="score scale JSON (default: shipped table)")
    p.add_argument(
        "--normalize",
        choices=("none", "year", "field", "year-field", "field-year"),
    )
    p.add_argument("--out", help="output CSV")
    p.add_argument("--config")
    p.set_defaults(handler=_cmd_llm)

    p = commands.add_parser("export", help="export stats or tidy plot data")
    _add_corpus_flags(p)
    p.add_argument("--plot-data", dest="plot_data", action="store_const", const=True)
    p.add_argument("--from", dest="from_file", help="wide CSV to convert")
    p.add_argument("--out", help="output CSV")
    p.set_defaults(handler=_cmd_export)

    p = commands.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host")
    p.add_argument("--port")
    p.add_argument("--config")
    p.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    namespace = parser.parse_args(argv)
    config = _load_config(namespace)
    args = _Args(namespace, config)
    try:
        return namespace.handler(args, parser)
    except ScindexError as exc:
        report = ValidationReport()
        report.add(type(exc).__name__, str(exc))
        return _fail(report)
    except FileNotFoundError as exc:
        report = ValidationReport()
        report.add("FileNotFound", str(exc))
        return _fail(report)


if __name__ == "__main__":
    sys.exit(main())
