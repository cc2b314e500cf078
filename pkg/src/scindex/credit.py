"""Authorship credit weighting for aggregate indicators.

Six counting strategies distribute credit across an ordered author list:

* full        -- every author gets credit 1 (credit is not conserved).
* fractional  -- every author gets 1/n.
* arithmetic  -- weight falls linearly with position: (n+1-i) / (n(n+1)/2).
* geometric   -- weight halves per position: 2^(n-i) / (2^n - 1).
* harmonic    -- weight proportional to 1/i, normalised by H_n.
* u_shaped    -- harmonic, except the last author is lifted to the rank-2
  share (senior-last convention), then renormalised; for n >= 3 the last
  author is joint second with position 2.

All strategies except full produce weights summing to exactly 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Collection, Mapping, Sequence

from .corpus import Article
from .errors import InvalidAuthorCount


class CreditKind(str, Enum):
    FULL = "full"
    FRACTIONAL = "fractional"
    ARITHMETIC = "arithmetic"
    GEOMETRIC = "geometric"
    HARMONIC = "harmonic"
    U_SHAPED = "u_shaped"


@dataclass(frozen=True)
class CreditScheme:
    kind: CreditKind
    params: Mapping[str, float] = field(default_factory=dict)

    @classmethod
    def parse(cls, name: str) -> "CreditScheme":
        return cls(CreditKind(name.strip().lower().replace("-", "_")))


FULL = CreditScheme(CreditKind.FULL)
FRACTIONAL = CreditScheme(CreditKind.FRACTIONAL)


def weights(n_authors: int, scheme: CreditScheme = FRACTIONAL) -> list[float]:
    """Per-position credit weights for an author list of length n."""
    if n_authors < 1:
        raise InvalidAuthorCount(f"need at least one author, got {n_authors}")
    n = n_authors
    kind = scheme.kind
    if kind is CreditKind.FULL:
        return [1.0] * n
    if kind is CreditKind.FRACTIONAL:
        return [1.0 / n] * n
    if kind is CreditKind.ARITHMETIC:
        total = n * (n + 1) / 2
        return [(n + 1 - i) / total for i in range(1, n + 1)]
    if kind is CreditKind.GEOMETRIC:
        ratio = float(scheme.params.get("ratio", 2.0))
        if ratio <= 1.0:
            raise ValueError("geometric ratio must exceed 1")
        raw = [ratio ** (n - i) for i in range(1, n + 1)]
        total = sum(raw)
        return [w / total for w in raw]
    if kind is CreditKind.HARMONIC:
        raw = [1.0 / i for i in range(1, n + 1)]
        total = sum(raw)
        return [w / total for w in raw]
    if kind is CreditKind.U_SHAPED:
        last_rank = int(scheme.params.get("last_rank", 2))
        raw = [1.0 / i for i in range(1, n + 1)]
        if n >= 3:
            raw[-1] = 1.0 / last_rank
        total = sum(raw)
        return [w / total for w in raw]
    raise ValueError(f"unknown credit kind {kind!r}")


def unit_credit(
    unit_author_ids: Collection[str],
    article: Article,
    scheme: CreditScheme = FRACTIONAL,
    author_weights: Sequence[float] | None = None,
) -> float:
    """Credit a unit receives for one article via the authors it owns.

    Full counting gives 1.0 when any author maps to the unit; the other
    strategies sum the positional weights of the unit's authors, so
    disjoint units get 0.0 and the credits of a partition of the author
    list sum to 1.  ``author_weights`` replaces the scheme weights with
    externally declared per-author contribution shares (same order as the
    article's author list).
    """
    owned = set(unit_author_ids)
    if not article.authors:
        return 0.0
    if scheme.kind is CreditKind.FULL and author_weights is None:
        return 1.0 if owned.intersection(article.authors) else 0.0
    if author_weights is not None:
        if len(author_weights) != len(article.authors):
            raise ValueError(
                "author_weights must match the article's author list length"
            )
        w = list(author_weights)
    else:
        w = weights(len(article.authors), scheme)
    return sum(
        w[i] for i, author in enumerate(article.authors) if author in owned
    )
