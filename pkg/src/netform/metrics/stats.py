"""Small statistics battery shared by the experiment reports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats


class DegenerateInputError(ValueError):
    """Input too small or without variance for the requested statistic."""


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float


@dataclass(frozen=True)
class LinregResult:
    slope: float
    intercept: float
    slope_p_value: float
    r_value: float
    slope_std_err: float


def _sample(x, name="sample", min_size=1) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64).ravel()
    if arr.size < min_size:
        raise DegenerateInputError(f"{name} needs at least {min_size} observations, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DegenerateInputError(f"{name} contains non-finite values")
    return arr


def ks_two_sample(a, b) -> TestResult:
    """Two-sample Kolmogorov-Smirnov statistic with the asymptotic p-value."""
    a = _sample(a, "first sample")
    b = _sample(b, "second sample")
    # identical ECDFs make scipy's asymptotic branch divide by zero; p is 1 then
    with np.errstate(divide="ignore", invalid="ignore"):
        res = stats.ks_2samp(a, b, method="asymp")
    if res.statistic == 0.0:
        return TestResult(0.0, 1.0)
    return TestResult(float(res.statistic), float(min(1.0, max(res.pvalue, np.finfo(float).tiny))))


def t_test_one_sample(x, mu0: float = 0.0) -> TestResult:
    x = _sample(x, min_size=2)
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("one-sample t-test on a zero-variance sample")
    res = stats.ttest_1samp(x, mu0)
    return TestResult(float(res.statistic), float(res.pvalue))


def t_test_two_sample(x, y, equal_var: bool = False) -> TestResult:
    """Welch's test by default."""
    x = _sample(x, min_size=2)
    y = _sample(y, min_size=2)
    if np.ptp(x) == 0.0 and np.ptp(y) == 0.0:
        raise DegenerateInputError("two-sample t-test with zero variance in both samples")
    res = stats.ttest_ind(x, y, equal_var=equal_var)
    return TestResult(float(res.statistic), float(res.pvalue))


def spearman(x, y) -> float:
    """Spearman rank correlation; ties receive average ranks."""
    x = _sample(x, min_size=2)
    y = _sample(y, min_size=2)
    if x.size != y.size:
        raise DegenerateInputError(f"length mismatch: {x.size} vs {y.size}")
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        raise DegenerateInputError("Spearman correlation undefined for a constant vector")
    rx = stats.rankdata(x)
    ry = stats.rankdata(y)
    return float(np.corrcoef(rx, ry)[0, 1])


def linreg(y, x) -> LinregResult:
    """Ordinary least squares ``y = slope * x + intercept``."""
    x = _sample(x, "x", min_size=2)
    y = _sample(y, "y", min_size=2)
    if x.size != y.size:
        raise DegenerateInputError(f"length mismatch: {x.size} vs {y.size}")
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("regressor has zero variance")
    res = stats.linregress(x, y)
    return LinregResult(float(res.slope), float(res.intercept), float(res.pvalue),
                        float(res.rvalue), float(res.stderr))


def bonferroni(p: float, n_tests: int) -> float:
    return min(1.0, p * n_tests)


def stars(p: float) -> str:
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""
