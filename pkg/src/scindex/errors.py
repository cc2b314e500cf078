"""Exception types shared across the engine.

Row-level ingestion problems (malformed rows, duplicate ids, unknown cited
ids) are reported through :class:`scindex.corpus.ValidationReport` entries
rather than raised, so that one bad row never aborts a whole file.
"""


class ScindexError(Exception):
    """Base class for all engine errors."""


# --- ingestion ---------------------------------------------------------


class MissingRequiredColumn(ScindexError):
    """An input file lacks a column required for ingestion."""


class EdgesUnavailable(ScindexError):
    """An operation needs citation edges but none were ingested."""


class UnclassifiedArticle(ScindexError):
    """No field codes could be resolved for an article."""


# --- normalisation and indicators --------------------------------------


class NormalizationUndefined(ScindexError):
    """A cited article has a zero (or missing) reference-group mean."""


class NoCitableItems(ScindexError):
    """A journal has no citable items in the requested window."""


class EmptyJournalYear(ScindexError):
    """A journal has no qualifying articles in the requested year set."""


class EmptyUnit(ScindexError):
    """A unit has no member articles (or no credit mass) to aggregate."""


# --- authorship credit --------------------------------------------------


class InvalidAuthorCount(ScindexError):
    """Author count must be a positive integer."""


# --- feature extraction -------------------------------------------------


class UnknownAuthor(ScindexError):
    """The author id has no articles in the corpus."""


class EmptyText(ScindexError):
    """No scoreable words remain after cleaning the text."""


# --- correlation validation ---------------------------------------------


class LengthMismatch(ScindexError):
    """Paired inputs have different lengths."""


class DegenerateInput(ScindexError):
    """Correlation input is constant or too small to correlate."""


class BaselineSaturated(ScindexError):
    """All actual classes are identical, so the baseline is 1."""


# --- aggregation ---------------------------------------------------------


class MissingValue(ScindexError):
    """Per-article values are missing for some unit members."""

    def __init__(self, message: str, ids=()):
        super().__init__(message)
        self.ids = tuple(ids)


class QuotaMismatch(ScindexError):
    """Quota class sizes do not sum to the number of articles."""


class FractionOutOfRange(ScindexError):
    """Replacement fraction must lie in (0, 1]."""


# --- simulation ----------------------------------------------------------


class InvalidSpec(ScindexError):
    """A synthetic-corpus specification has impossible parameters."""


# --- LLM score post-processing -------------------------------------------


class EmptyScores(ScindexError):
    """A repeated-score record contains no scores."""


class EmptyYear(ScindexError):
    """A year group contains no scores."""


class ZeroFieldMean(ScindexError):
    """Field mean is zero; scores cannot be divided by it."""


class OutOfDomain(ScindexError):
    """A value lies outside the score scale's domain."""


class InsufficientData(ScindexError):
    """Too few distinct expert labels to calibrate a scale."""
