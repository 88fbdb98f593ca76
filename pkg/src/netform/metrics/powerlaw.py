"""Discrete power-law exponent via the shifted continuous MLE."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import zeta


class PowerLawError(ValueError):
    pass


@dataclass(frozen=True)
class PowerLawFit:
    gamma_hat: float
    std_err: float
    x_min: float
    n_tail: int
    ks_distance: float = float("nan")


def _fit_tail(x: np.ndarray, x_min: float) -> tuple[float, float, int]:
    tail = x[x >= x_min]
    if tail.size < 2:
        raise PowerLawError(f"need at least 2 observations >= x_min={x_min}, got {tail.size}")
    denom = float(np.log(tail / (x_min - 0.5)).sum())
    if denom <= 0.0:
        raise PowerLawError("degenerate tail: log-sum is not positive")
    gamma = 1.0 + tail.size / denom
    return float(gamma), float((gamma - 1.0) / np.sqrt(tail.size)), int(tail.size)


def _tail_ks(x: np.ndarray, x_min: float, gamma: float) -> float:
    """Sup distance between the empirical tail CDF and the discrete power law."""
    tail = x[x >= x_min]
    values, counts = np.unique(tail, return_counts=True)
    emp = np.cumsum(counts) / tail.size
    # P(X <= v) = 1 - zeta(gamma, v + 1) / zeta(gamma, x_min), valid on integers
    model = 1.0 - zeta(gamma, values + 1.0) / zeta(gamma, x_min)
    return float(np.max(np.abs(emp - model)))


# the closed-form estimator is badly biased below roughly this cutoff
SCAN_FLOOR = 6


def power_law_fit(degrees, x_min: float | None = None, scan: bool = False,
                  min_tail: int = 10, scan_floor: float = SCAN_FLOOR) -> PowerLawFit:
    """Fit ``P(k) ~ k^-gamma`` to the sample.

    ``x_min`` defaults to the smallest positive value.  With ``scan=True`` every
    observed value from ``scan_floor`` up that leaves at least ``min_tail``
    points in the tail is tried, and the one minimising the KS distance to the
    fitted discrete power law wins.
    """
    x = np.asarray(degrees, dtype=np.float64).ravel()
    x = x[np.isfinite(x)]
    if scan:
        cands = np.unique(x[x >= max(1.0, scan_floor)])
        best = None
        for xm in cands:
            if np.count_nonzero(x >= xm) < max(2, min_tail):
                break
            gamma, se, n_tail = _fit_tail(x, float(xm))
            d = _tail_ks(x, float(xm), gamma)
            if best is None or d < best.ks_distance:
                best = PowerLawFit(gamma, se, float(xm), n_tail, d)
        if best is None:
            raise PowerLawError("no candidate x_min leaves enough tail observations")
        return best
    if x_min is None:
        pos = x[x > 0]
        if pos.size == 0:
            raise PowerLawError("no positive observations")
        x_min = float(pos.min())
    if x_min < 1:
        raise PowerLawError(f"x_min must be >= 1, got {x_min}")
    gamma, se, n_tail = _fit_tail(x, float(x_min))
    return PowerLawFit(gamma, se, float(x_min), n_tail, _tail_ks(x, float(x_min), gamma))
