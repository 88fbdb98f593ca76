"""Three-candidate survey: generated instances, responses and alignment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from netform.experiments.artifact import RunArtifact
from netform.experiments.config import ExperimentConfig
from netform.experiments.drivers import _new_artifact, llm_config
from netform.policies.agents import decide_mnl
from netform.policies.llm import LlmClient, LlmExhaustedError
from netform.policies.prompts import parse_survey_response, render_survey_prompt
from netform.rng import stream
from netform.choice.borda import CRITERIA

N_CANDIDATES = 3
MAX_DEGREE = 1000


@dataclass(frozen=True)
class SurveyInstance:
    context: str
    respondent: int
    candidates: tuple[dict, ...]  # each {"degree", "common", "similarity"}

    def raw(self) -> np.ndarray:
        return np.array([[c["degree"], c["similarity"], c["common"]] for c in self.candidates], dtype=np.float64)


def generate_instance(context: str, respondent: int, rng) -> SurveyInstance:
    sim_hi = 10 if context == "social" else 1
    cands = []
    for _ in range(N_CANDIDATES):
        d = int(rng.integers(0, MAX_DEGREE + 1))
        cands.append({"degree": d, "common": int(rng.integers(0, d + 1)),
                      "similarity": int(rng.integers(0, sim_hi + 1))})
    return SurveyInstance(context, respondent, tuple(cands))


def scripted_rankings(theta) -> dict[str, int]:
    """Criteria ordered by decreasing coefficient; ties keep (PA, TC, H) order."""
    # theta is (PA, H, TC); CRITERIA is (degree, common_friends, similarity)
    weights = {"degree": theta[0], "common_friends": theta[2], "similarity": theta[1]}
    order = sorted(CRITERIA, key=lambda c: (-weights[c], CRITERIA.index(c)))
    return {c: order.index(c) + 1 for c in CRITERIA}


def run_survey(cfg: ExperimentConfig, client: LlmClient | None = None) -> RunArtifact:
    art = _new_artifact(cfg)
    pol = cfg.policy
    prng = stream(cfg.seed, "policy", pol.seed)
    dropped = {c: 0 for c in cfg.contexts}
    t = 0
    own_client = False
    if pol.kind == "llm" and client is None:
        client = LlmClient(llm_config(cfg))
        own_client = True
    from netform.experiments.artifact import DecisionRecord

    try:
        for context in cfg.contexts:
            inst_rng = stream(cfg.seed, "survey", context)
            for r in range(cfg.respondents):
                inst = generate_instance(context, r, inst_rng)
                raw = inst.raw()
                text = None
                if pol.kind == "llm":
                    prompt = render_survey_prompt(context, inst.candidates)
                    try:
                        ans = client.query(prompt, lambda s: parse_survey_response(s, N_CANDIDATES))
                    except LlmExhaustedError:
                        dropped[context] += 1
                        continue
                    choice, rankings, text = ans.choice, ans.rankings, ans.raw_response
                elif pol.kind == "random":
                    choice = int(prng.integers(N_CANDIDATES))
                    perm = prng.permutation(3) + 1
                    rankings = {c: int(perm[k]) for k, c in enumerate(CRITERIA)}
                elif pol.kind == "mnl":
                    choice = decide_mnl(pol.theta, np.log1p(raw), 1, prng)[0]
                    rankings = scripted_rankings(pol.theta)
                else:
                    raise ValueError(f"policy {pol.kind!r} cannot answer the survey")
                art.decisions.append(DecisionRecord(
                    t, 0, r, list(range(N_CANDIDATES)), raw.tolist(), [choice], [str(choice + 1)], text,
                    pol.kind, None, {"context": context, "rankings": rankings,
                                     "candidates": [dict(c) for c in inst.candidates]}))
                t += 1
    finally:
        if own_client:
            client.close()
    art.extra["dropped"] = dropped
    return art
