"""Scripted link-choice policies and the common policy interface."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from netform.choice.dataset import FEATURES
from netform.policies.prompts import PolicyDecision, PromptBundle, decision_from_indices, display_name
from netform.rng import as_generator


class PolicyError(RuntimeError):
    """A policy could not produce a decision (e.g. endpoint exhausted)."""


@dataclass
class DecisionContext:
    """Everything a policy may look at for one query."""

    chooser: int
    candidates: Sequence[int]  # presented order
    raw: np.ndarray  # (|A|, 3) raw (d, w, c)
    delta: int
    bundle: Callable[[], PromptBundle] | None = None

    @property
    def names(self) -> list[str]:
        return [display_name(v) for v in self.candidates]


def decide_random(candidates: Sequence, delta: int, seed) -> list[int]:
    """Positions of ``delta`` candidates drawn uniformly without replacement."""
    n = len(candidates)
    if delta > n:
        raise ValueError(f"delta={delta} exceeds the {n} available candidates")
    if delta < 0:
        raise ValueError("delta must be non-negative")
    rng = as_generator(seed)
    return [int(i) for i in rng.choice(n, size=delta, replace=False)]


def decide_mnl(theta, features: np.ndarray, delta: int, seed) -> list[int]:
    """Top-``delta`` positions by ``theta . x`` plus i.i.d. standard Gumbel noise."""
    theta = np.asarray(theta, dtype=np.float64)
    features = np.asarray(features, dtype=np.float64).reshape(-1, theta.size)
    if delta < 1:
        raise ValueError("delta must be >= 1")
    u = features @ theta
    if not np.all(np.isfinite(u)):
        raise ValueError("non-finite utility")
    rng = as_generator(seed)
    noisy = u + rng.gumbel(size=u.size)
    order = np.argsort(-noisy, kind="stable")
    return [int(i) for i in order[: min(delta, u.size)]]


class Policy:
    name = "policy"

    def fingerprint(self) -> str:
        return self.name

    def decide(self, ctx: DecisionContext) -> PolicyDecision:
        raise NotImplementedError


class RandomPolicy(Policy):
    name = "random"

    def __init__(self, seed=0):
        self.rng = as_generator(seed)

    def decide(self, ctx):
        k = min(ctx.delta, len(ctx.candidates))
        return decision_from_indices(decide_random(ctx.candidates, k, self.rng), ctx.names, self.fingerprint())


class MnlPolicy(Policy):
    """Gumbel-argmax agent on ``log(1 + raw)`` features (PA, H, TC)."""

    name = "mnl"

    def __init__(self, theta, seed=0):
        self.theta = np.asarray(theta, dtype=np.float64)
        self.rng = as_generator(seed)

    def fingerprint(self):
        return "mnl(" + ",".join(repr(float(t)) for t in self.theta) + ")"

    def decide(self, ctx):
        idx = decide_mnl(self.theta, np.log1p(ctx.raw), ctx.delta, self.rng)
        return decision_from_indices(idx, ctx.names, self.fingerprint())


class ArgmaxPolicy(Policy):
    """Deterministic: highest raw feature, ties to the lowest node id."""

    name = "argmax"

    def __init__(self, key: str = "degree"):
        if key not in FEATURES:
            raise ValueError(f"argmax key must be one of {FEATURES}")
        self.key = key

    def fingerprint(self):
        return f"argmax({self.key})"

    def decide(self, ctx):
        col = ctx.raw[:, FEATURES.index(self.key)]
        order = sorted(range(len(ctx.candidates)), key=lambda j: (-col[j], ctx.candidates[j]))
        return decision_from_indices(order[: ctx.delta], ctx.names, self.fingerprint())


class AbstainPolicy(Policy):
    """Never selects anyone."""

    name = "abstain"

    def decide(self, ctx):
        return PolicyDecision((), (), None, self.fingerprint())


class LlmPolicy(Policy):
    name = "llm"

    def __init__(self, client):
        self.client = client

    def fingerprint(self):
        return self.client.fingerprint()

    def decide(self, ctx):
        from netform.policies.llm import LlmExhaustedError, llm_decide

        if ctx.bundle is None:
            raise PolicyError("LLM policy needs a prompt bundle")
        try:
            return llm_decide(self.client, ctx.bundle())
        except LlmExhaustedError as exc:
            raise PolicyError(str(exc)) from exc


def simulate_mnl_observations(theta, n_obs: int, set_size: int, seed, max_degree: int = 50,
                              max_similarity: int = 3, max_common: int = 10):
    """Synthetic choice data drawn by the Gumbel agent on random raw features."""
    from netform.choice.dataset import ChoiceObservation

    rng = as_generator(seed)
    obs = []
    for t in range(n_obs):
        raw = np.column_stack([
            rng.integers(0, max_degree + 1, size=set_size),
            rng.integers(0, max_similarity + 1, size=set_size),
            rng.integers(0, max_common + 1, size=set_size),
        ]).astype(np.float64)
        chosen = decide_mnl(theta, np.log1p(raw), 1, rng)[0]
        obs.append(ChoiceObservation(t, tuple(range(set_size)), raw, chosen))
    return obs
