"""Probability that the chosen alternative ranks in the top-k% by a score."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from netform.choice.dataset import FEATURES, ChoiceDataError, ChoiceDataset

DEFAULT_GRID = tuple(range(1, 101))


@dataclass(frozen=True)
class TopKCurve:
    grid: tuple[float, ...]  # k as a percentage of the alternative set
    prob: np.ndarray
    null: np.ndarray
    n_decisions: int
    score_key: str
    ties: str

    def std_err(self) -> np.ndarray:
        """Binomial standard error of each curve point under the null."""
        return np.sqrt(self.null * (1.0 - self.null) / self.n_decisions)


def _credit(scores: np.ndarray, chosen: int, frac: np.ndarray, ties: str) -> np.ndarray:
    n = scores.size
    if n == 0:
        raise ChoiceDataError("observation with an empty alternative set")
    s = scores[chosen]
    above = int(np.count_nonzero(scores > s))
    equal = int(np.count_nonzero(scores == s))
    lo = above + 1  # min-rank
    hi = above + equal
    m = frac * n
    if ties == "min":
        return (lo <= m + 1e-9).astype(np.float64)
    # tie block spread uniformly over positions lo..hi
    return np.clip((m - (lo - 1)) / (hi - lo + 1), 0.0, 1.0)


def topk_curve_from_pairs(decisions: Iterable[tuple[Sequence[float], int]], grid=DEFAULT_GRID,
                          ties: str = "fractional", score_key: str = "score") -> TopKCurve:
    """Curve from ``(scores of the presented alternatives, chosen index)`` pairs.

    ``ties="fractional"`` spreads credit over a tie block so a uniformly random
    choice gives exactly ``k/100`` at every grid point.  ``ties="min"`` gives
    the whole block its best rank.
    """
    if ties not in ("fractional", "min"):
        raise ValueError(f"unknown tie convention {ties!r}")
    frac = np.asarray(grid, dtype=np.float64) / 100.0
    total = np.zeros(frac.size)
    count = 0
    for scores, chosen in decisions:
        scores = np.asarray(scores, dtype=np.float64)
        if not 0 <= int(chosen) < scores.size:
            raise ChoiceDataError(f"chosen index {chosen} out of range")
        total += _credit(scores, int(chosen), frac, ties)
        count += 1
    if count == 0:
        raise ChoiceDataError("top-k curve needs at least one decision")
    return TopKCurve(tuple(float(g) for g in grid), total / count, frac.copy(), count, score_key, ties)


def topk_curve(log: ChoiceDataset | Iterable, score_key: str = "degree", grid=DEFAULT_GRID,
               ties: str = "fractional") -> TopKCurve:
    if score_key not in FEATURES:
        raise ValueError(f"score_key must be one of {FEATURES}, got {score_key!r}")
    col = FEATURES.index(score_key)
    pairs = ((obs.raw[:, col], obs.chosen) for obs in log)
    return topk_curve_from_pairs(pairs, grid, ties, score_key)
