from netform.policies.agents import (
    AbstainPolicy, ArgmaxPolicy, DecisionContext, LlmPolicy, MnlPolicy, Policy, PolicyError, RandomPolicy,
    decide_mnl, decide_random,
)
from netform.policies.llm import (
    CacheCorruptionError, LlmClient, LlmEndpointConfig, LlmError, LlmExhaustedError, ResponseCache, cache_key,
    llm_decide,
)
from netform.policies.prompts import (
    CandidateProfile, PolicyDecision, PromptBundle, PromptError, ResponseParseError, ResponseValidationError,
    SurveyAnswer, parse_response, parse_survey_response, render_prompt, render_survey_prompt,
)

__all__ = [name for name in dir() if not name.startswith("_")]
