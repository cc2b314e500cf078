"""scindex: a scientometrics computation engine.

Ingests article/citation corpora and computes field-and-year normalised
citation indicators, journal impact metrics, authorship credit, percentile
memberships, correlation validation, unit aggregation with score-substitution
analysis, Monte Carlo simulation, and LLM quality-score post-processing.
"""

__version__ = "0.1.0"
