"""Correlation validation of indicators against quality scores.

Spearman (midranks for ties, then the product-moment formula on the rank
vectors) and Pearson correlations with 95% confidence intervals via the
Fisher z transform, tanh(atanh(rho) +/- 1.96/sqrt(n-3)); the same
transform is applied to the rank correlation as an approximation.

Interpretation bands on |rho|: below 0.2 negligible, [0.2, 0.3) weak,
[0.3, 0.4) moderate, [0.4, 0.5) moderate_strong, 0.5 and above strong.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BaselineSaturated, DegenerateInput, LengthMismatch

BANDS = ("negligible", "weak", "moderate", "moderate_strong", "strong")

_Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class CorrelationResult:
    method: str
    rho: float
    n: int
    ci_low: float
    ci_high: float
    band: str

    @property
    def significant(self) -> bool:
        """True when the 95% interval excludes zero."""
        return self.ci_low > 0.0 or self.ci_high < 0.0


def interpret_band(rho: float) -> str:
    r = abs(rho)
    if r < 0.2:
        return "negligible"
    if r < 0.3:
        return "weak"
    if r < 0.4:
        return "moderate"
    if r < 0.5:
        return "moderate_strong"
    return "strong"


def midranks(values: Sequence[float]) -> np.ndarray:
    """Ranks starting at 1; tied values share the mean of their ranks."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=float)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _check(x: Sequence[float], y: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    if len(x) != len(y):
        raise LengthMismatch(f"lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 4:
        raise DegenerateInput(f"need at least 4 pairs, got {len(x)}")
    ax = np.asarray(x, dtype=float)
    ay = np.asarray(y, dtype=float)
    if np.all(ax == ax[0]) or np.all(ay == ay[0]):
        raise DegenerateInput("a constant vector cannot be correlated")
    return ax, ay


def _product_moment(ax: np.ndarray, ay: np.ndarray) -> float:
    dx = ax - ax.mean()
    dy = ay - ay.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        raise DegenerateInput("zero variance after centring")
    return max(-1.0, min(1.0, float(dx @ dy) / denom))


def _fisher_ci(rho: float, n: int) -> tuple[float, float]:
    if 1.0 - abs(rho) < 1e-15:
        return rho, rho
    z = math.atanh(rho)
    half = _Z95 / math.sqrt(n - 3)
    return math.tanh(z - half), math.tanh(z + half)


def pearson(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Product-moment correlation with a Fisher-z 95% interval."""
    ax, ay = _check(x, y)
    rho = _product_moment(ax, ay)
    lo, hi = _fisher_ci(rho, len(ax))
    return CorrelationResult("pearson", rho, len(ax), lo, hi, interpret_band(rho))


def spearman(x: Sequence[float], y: Sequence[float]) -> CorrelationResult:
    """Rank correlation: midranks on each side, then the product-moment
    formula on the rank vectors."""
    ax, ay = _check(x, y)
    rho = _product_moment(midranks(ax), midranks(ay))
    lo, hi = _fisher_ci(rho, len(ax))
    return CorrelationResult("spearman", rho, len(ax), lo, hi, interpret_band(rho))


def accuracy_above_baseline(
    predicted: Sequence, actual: Sequence
) -> tuple[float, float, float]:
    """(raw accuracy, modal baseline, accuracy above baseline).

    The baseline is the frequency of the most common actual class; the
    headline number is (raw - baseline) / (1 - baseline), computed from
    integer counts so exact-ratio cases come out exact.  Negative values
    mean worse than always guessing the modal class.
    """
    if len(predicted) != len(actual):
        raise LengthMismatch(f"lengths differ: {len(predicted)} vs {len(actual)}")
    if not actual:
        raise DegenerateInput("empty inputs")
    n = len(actual)
    tallies: dict = {}
    for label in actual:
        tallies[label] = tallies.get(label, 0) + 1
    n_modal = max(tallies.values())
    if n_modal == n:
        raise BaselineSaturated("all actual classes identical; baseline is 1")
    n_correct = sum(1 for p, a in zip(predicted, actual) if p == a)
    raw = n_correct / n
    baseline = n_modal / n
    above = (n_correct - n_modal) / (n - n_modal)
    return raw, baseline, above
