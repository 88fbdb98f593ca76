"""Borda vectors from criterion rankings and agreement summaries."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from netform.metrics.stats import DegenerateInputError, spearman

# component order of every Borda vector
CRITERIA = ("degree", "common_friends", "similarity")


class RankingError(ValueError):
    pass


def borda_vector(ranking) -> tuple[int, int, int]:
    """Ranks (1 = most important) to Borda scores in (PA, TC, H) order.

    ``ranking`` is a mapping keyed by :data:`CRITERIA` or a triple in that order.
    """
    if isinstance(ranking, Mapping):
        try:
            ranks = [int(ranking[c]) for c in CRITERIA]
        except KeyError as exc:
            raise RankingError(f"ranking is missing criterion {exc.args[0]!r}") from None
    else:
        ranks = [int(r) for r in ranking]
    if sorted(ranks) != [1, 2, 3]:
        raise RankingError(f"rankings must be a permutation of 1, 2, 3; got {ranks}")
    return tuple(4 - r for r in ranks)


def _safe_spearman(a, b) -> float:
    try:
        return spearman(a, b)
    except DegenerateInputError:
        return float("nan")


@dataclass(frozen=True)
class AlignmentReport:
    vectors: dict[str, np.ndarray]
    means: dict[str, np.ndarray]
    within: dict[str, float]
    between: dict[tuple[str, str], dict[str, float]]

    def as_dict(self) -> dict:
        return {
            "means": {k: v.tolist() for k, v in self.means.items()},
            "within_spearman": dict(self.within),
            "between": {f"{a}|{b}": v for (a, b), v in self.between.items()},
        }


def within_agreement(vectors: np.ndarray) -> float:
    """Mean pairwise Spearman between respondents' Borda vectors."""
    if len(vectors) < 2:
        return float("nan")
    vals = [_safe_spearman(vectors[i], vectors[j]) for i, j in combinations(range(len(vectors)), 2)]
    return float(np.mean(vals))


def borda_alignment(groups: Mapping[str, Sequence]) -> AlignmentReport:
    """Per-group Borda vectors, their means, and within/between agreement."""
    vectors = {name: np.array([borda_vector(r) for r in rankings], dtype=np.float64).reshape(-1, 3)
               for name, rankings in groups.items()}
    means = {name: v.mean(axis=0) if len(v) else np.full(3, np.nan) for name, v in vectors.items()}
    within = {name: within_agreement(v) for name, v in vectors.items()}
    between = {}
    for a, b in combinations(sorted(vectors), 2):
        between[(a, b)] = {
            "spearman": _safe_spearman(means[a], means[b]),
            "l2": float(np.linalg.norm(means[a] - means[b])),
        }
    return AlignmentReport(vectors, means, within, between)
