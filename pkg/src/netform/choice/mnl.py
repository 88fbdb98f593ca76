"""Conditional logit over (PA, H, TC) features: likelihood, fit, AMEs, TV distance."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize, stats

from netform.choice.dataset import FEATURE_LABELS, ChoiceDataError, ChoiceDataset
from netform.rng import as_generator

N_PARAMS = 3


class NonIdentifiableError(ChoiceDataError):
    """Data cannot pin down some coefficient."""


@dataclass(frozen=True)
class MnlParams:
    theta_pa: float
    theta_h: float
    theta_tc: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise ValueError("MNL parameters must be finite")

    @classmethod
    def from_array(cls, a) -> "MnlParams":
        a = np.asarray(a, dtype=np.float64).ravel()
        if a.size != N_PARAMS:
            raise ValueError(f"expected {N_PARAMS} coefficients, got {a.size}")
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.theta_pa, self.theta_h, self.theta_tc], dtype=np.float64)


@dataclass(frozen=True)
class MnlFit:
    params: MnlParams
    std_errs: np.ndarray
    p_values: np.ndarray
    log_likelihood: float
    aic: float
    aic_k4: float
    n_obs: int
    grad_norm: float
    covariance: np.ndarray = field(repr=False)
    se_convention: str = "mean"

    @property
    def theta(self) -> np.ndarray:
        return self.params.as_array()

    def table(self) -> list[dict]:
        from netform.metrics.stats import stars

        return [
            {"feature": name, "coef": float(c), "std_err": float(s), "p_value": float(p), "stars": stars(float(p))}
            for name, c, s, p in zip(FEATURE_LABELS, self.theta, self.std_errs, self.p_values)
        ]


def feature_transform(x, x_max: float | None = None) -> np.ndarray:
    """``ln((x + 1) / (x_max + 1))`` with ``x_max`` the column maximum by default."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise ChoiceDataError("cannot transform an empty column")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ChoiceDataError("features must be finite and non-negative")
    if x_max is None:
        x_max = float(x.max())
    return np.log1p(x) - np.log1p(x_max)


def feature_transform_matrix(raw: np.ndarray, x_max=None) -> tuple[np.ndarray, np.ndarray]:
    raw = np.asarray(raw, dtype=np.float64)
    if x_max is None:
        x_max = raw.max(axis=0)
    x_max = np.asarray(x_max, dtype=np.float64)
    X = np.column_stack([feature_transform(raw[:, k], x_max[k]) for k in range(raw.shape[1])])
    return X, x_max


def _group_lse(u: np.ndarray, data: ChoiceDataset) -> np.ndarray:
    starts = data.offsets[:-1]
    mx = np.maximum.reduceat(u, starts)
    s = np.add.reduceat(np.exp(u - mx[data.group]), starts)
    return mx + np.log(s)


def choice_probabilities(theta, data: ChoiceDataset) -> np.ndarray:
    """Within-set softmax probabilities, stacked like ``data.X``."""
    u = data.X @ np.asarray(theta, dtype=np.float64)
    return np.exp(u - _group_lse(u, data)[data.group])


def _check_theta(theta) -> np.ndarray:
    t = np.asarray(theta.as_array() if isinstance(theta, MnlParams) else theta, dtype=np.float64)
    if t.shape != (N_PARAMS,):
        raise ValueError(f"theta must have {N_PARAMS} entries")
    return t


def mnl_loglik(theta, data: ChoiceDataset) -> tuple[float, np.ndarray]:
    """Summed log-likelihood and its gradient."""
    t = _check_theta(theta)
    if not np.all(np.isfinite(data.X)):
        raise ChoiceDataError("non-finite transformed features")
    u = data.X @ t
    lse = _group_lse(u, data)
    p = np.exp(u - lse[data.group])
    ll = float(u[data.chosen_flat].sum() - lse.sum())
    grad = data.X[data.chosen_flat].sum(axis=0) - p @ data.X
    return ll, grad


def mnl_hessian(theta, data: ChoiceDataset) -> np.ndarray:
    """Hessian of the summed log-likelihood (negative semi-definite)."""
    t = _check_theta(theta)
    p = choice_probabilities(t, data)
    xbar = np.add.reduceat(p[:, None] * data.X, data.offsets[:-1], axis=0)
    second = (data.X * p[:, None]).T @ data.X
    return -(second - xbar.T @ xbar)


def _check_identifiable(data: ChoiceDataset) -> None:
    starts = data.offsets[:-1]
    spread = np.maximum.reduceat(data.X, starts, axis=0) - np.minimum.reduceat(data.X, starts, axis=0)
    for k, label in enumerate(FEATURE_LABELS):
        if np.all(spread[:, k] <= 1e-15):
            raise NonIdentifiableError(
                f"feature {label} is constant within every alternative set; its coefficient is not identified")
    xbar = np.add.reduceat(data.X, starts, axis=0) / data.sizes[:, None]
    centered = data.X - xbar[data.group]
    if np.linalg.matrix_rank(centered) < N_PARAMS:
        raise NonIdentifiableError("features are collinear within alternative sets")


def fit_mnl(data: ChoiceDataset, se_convention: str = "mean", x0=None, min_obs: int = 10) -> MnlFit:
    """Maximum-likelihood fit.

    ``se_convention="mean"`` takes ``H`` as the Hessian of the average
    log-likelihood in ``sqrt(diag(-H^-1) / N)``, which equals the usual
    observed-information standard error.  ``"sum"`` plugs in the Hessian of the
    summed log-likelihood instead.
    """
    if se_convention not in ("mean", "sum"):
        raise ValueError(f"unknown se_convention {se_convention!r}")
    n = len(data)
    if n < min_obs:
        raise ChoiceDataError(f"need at least {min_obs} observations, got {n}")
    _check_identifiable(data)

    def objective(t):
        ll, g = mnl_loglik(t, data)
        return -ll / n, -g / n

    start = np.zeros(N_PARAMS) if x0 is None else np.asarray(x0, dtype=np.float64)
    res = optimize.minimize(objective, start, jac=True, method="L-BFGS-B",
                            options={"maxiter": 1000, "gtol": 1e-10, "ftol": 1e-15})
    theta = res.x
    # Newton polish with backtracking
    ll, g = mnl_loglik(theta, data)
    for _ in range(100):
        if np.linalg.norm(g) / n <= 1e-12:
            break
        H = mnl_hessian(theta, data)
        try:
            step = np.linalg.solve(H, -g)
        except np.linalg.LinAlgError:
            break
        a = 1.0
        while a > 1e-10:
            cand = theta + a * step
            ll_c, g_c = mnl_loglik(cand, data)
            if ll_c >= ll - 1e-12 * abs(ll):
                break
            a *= 0.5
        else:
            break
        theta, ll, g = cand, ll_c, g_c
    H_sum = mnl_hessian(theta, data)
    H = H_sum / n if se_convention == "mean" else H_sum
    try:
        cov = np.linalg.inv(-H) / n
    except np.linalg.LinAlgError:
        cov = np.full((N_PARAMS, N_PARAMS), np.inf)
    se = np.sqrt(np.clip(np.diag(cov), 0.0, np.inf))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, theta / se, np.inf)
    pvals = 2.0 * stats.norm.sf(np.abs(z))
    return MnlFit(MnlParams.from_array(theta), se, pvals, float(ll), 2 * N_PARAMS - 2.0 * ll,
                  2 * (N_PARAMS + 1) - 2.0 * ll, n, float(np.linalg.norm(g) / n), cov, se_convention)


def aic(log_likelihood: float, k: int = N_PARAMS) -> float:
    return 2.0 * k - 2.0 * log_likelihood


@dataclass(frozen=True)
class MarginalEffects:
    ame: np.ndarray
    std_err: np.ndarray

    def as_dict(self) -> dict:
        return {label: {"ame": float(a), "std_err": float(s)}
                for label, a, s in zip(FEATURE_LABELS, self.ame, self.std_err)}


def average_marginal_effects(fit: MnlFit | np.ndarray, data: ChoiceDataset,
                             covariance: np.ndarray | None = None) -> MarginalEffects:
    """Own-feature effects ``theta_k * p * (1 - p)`` averaged over all alternatives.

    Standard errors use the delta method with the fit covariance.
    """
    if isinstance(fit, MnlFit):
        theta = fit.theta
        cov = fit.covariance if covariance is None else covariance
    else:
        theta = np.asarray(fit, dtype=np.float64)
        cov = covariance
    p = choice_probabilities(theta, data)
    q = p * (1.0 - p)
    mean_q = q.mean()
    ame = theta * mean_q
    if cov is None:
        return MarginalEffects(ame, np.full(N_PARAMS, np.nan))
    # d p_j / d theta = p_j (x_j - xbar_t)
    xbar = np.add.reduceat(p[:, None] * data.X, data.offsets[:-1], axis=0)
    dp = p[:, None] * (data.X - xbar[data.group])
    dmean_q = ((1.0 - 2.0 * p)[:, None] * dp).mean(axis=0)
    jac = np.eye(N_PARAMS) * mean_q + np.outer(theta, dmean_q)
    var = np.einsum("ij,jk,ik->i", jac, cov, jac)
    return MarginalEffects(ame, np.sqrt(np.clip(var, 0.0, np.inf)))


def set_probabilities(theta, raw: np.ndarray) -> np.ndarray:
    """Softmax over one alternative set given raw (d, w, c) rows."""
    u = np.log1p(np.asarray(raw, dtype=np.float64)) @ np.asarray(theta, dtype=np.float64)
    u -= u.max()
    e = np.exp(u)
    return e / e.sum()


def tv_between(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


SetSampler = Callable[[np.random.Generator], np.ndarray]


def tv_distance(fit_a, fit_b, sampler: SetSampler, n_mc: int = 1000, seed=0) -> float:
    """Monte-Carlo mean of the per-set total variation between two fitted models.

    ``sampler(rng)`` returns the raw (d, w, c) rows of one alternative set.
    The shift in the feature transform cancels inside each softmax, so raw
    ``log1p`` features are enough.
    """
    if n_mc < 1:
        raise ValueError("n_mc must be >= 1")
    ta = fit_a.theta if isinstance(fit_a, MnlFit) else _check_theta(fit_a)
    tb = fit_b.theta if isinstance(fit_b, MnlFit) else _check_theta(fit_b)
    rng = as_generator(seed)
    total = 0.0
    for _ in range(n_mc):
        raw = sampler(rng)
        total += tv_between(set_probabilities(ta, raw), set_probabilities(tb, raw))
    return total / n_mc


def fixed_set_sampler(raw) -> SetSampler:
    raw = np.asarray(raw, dtype=np.float64)
    return lambda rng: raw


def dataset_sampler(data: ChoiceDataset) -> SetSampler:
    """Draw logged alternative sets uniformly."""
    def draw(rng):
        t = int(rng.integers(len(data)))
        return data.observations[t].raw

    return draw
