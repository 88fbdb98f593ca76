"""Prompt rendering and response parsing for the link-choice query."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

ENVIRONMENTS = {
    "baseline": "",
    "school": "You are located in a school. ",
    "work": "You are located in a workplace. ",
    "community": "You are located in a community. ",
}
VARIANTS = ("standard", "cot")

_OUTPUT_FIELDS = {
    "standard": ('        "name" : name of the person you selected,\n'
                 '        "reason" : reason for selecting the person\n'),
    "cot": ('        "reason" : reason for selecting the person,\n'
            '        "name" : name of the person you selected\n'),
}

TEMPLATE = """# Task
{prefix}Your task is to select a set of people to be friends with.

# Profile
Your profile is given below after chevrons:
<PROFILE>
{profile}
</PROFILE>

# Candidate Profiles
The candidate profiles to be friends with are given below after chevrons:

<PROFILES>
{profiles}
</PROFILES>

# Output
The output should be given a list of JSON objects with the following structure

[
    {{
{fields}    }}, ...
]

# Notes
- The output must be a list of JSON objects ranked in the order of preference.
- You can make at most {delta} selections.
"""


class PromptError(ValueError):
    pass


class ResponseParseError(ValueError):
    """No JSON array could be extracted from the model output."""


class ResponseValidationError(ValueError):
    """The parsed output names no valid candidate."""


def display_name(node: int) -> str:
    return f"Person {int(node)}"


@dataclass(frozen=True)
class CandidateProfile:
    display_name: str
    features: Mapping[str, Any] = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        obj = {"name": self.display_name}
        for k, v in self.features.items():
            if k == "name":
                raise PromptError("feature key 'name' is reserved")
            obj[k] = v
        return obj


@dataclass(frozen=True)
class PromptBundle:
    environment: str
    self_profile: CandidateProfile
    candidates: tuple[CandidateProfile, ...]
    delta: int
    variant: str = "standard"

    def __post_init__(self):
        if self.environment not in ENVIRONMENTS:
            raise PromptError(f"unknown environment {self.environment!r}; expected one of {sorted(ENVIRONMENTS)}")
        if self.variant not in VARIANTS:
            raise PromptError(f"unknown variant {self.variant!r}")
        if not self.candidates:
            raise PromptError("candidate list is empty")
        if self.delta < 1:
            raise PromptError(f"delta must be >= 1, got {self.delta}")
        names = [c.display_name for c in self.candidates]
        if len(set(names)) != len(names):
            raise PromptError("candidate display names must be unique")
        object.__setattr__(self, "candidates", tuple(self.candidates))

    @property
    def names(self) -> list[str]:
        return [c.display_name for c in self.candidates]


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


def render_prompt(bundle: PromptBundle) -> str:
    return TEMPLATE.format(
        prefix=ENVIRONMENTS[bundle.environment],
        profile=_dump(bundle.self_profile.to_json_obj()),
        profiles=_dump([c.to_json_obj() for c in bundle.candidates]),
        fields=_OUTPUT_FIELDS[bundle.variant],
        delta=int(bundle.delta),
    )


# --------------------------------------------------------------------------
# feature blocks per experiment

def names_of(nodes: Sequence[int]) -> list[str]:
    return [display_name(v) for v in nodes]


def neighbors_profile(g, v: int) -> CandidateProfile:
    return CandidateProfile(display_name(v), {"neighbors": names_of(g.neighbors(v))})


def degree_profile(g, v: int) -> CandidateProfile:
    return CandidateProfile(display_name(v), {"degree": g.degree(v)})


def common_neighbors_profile(g, i: int, v: int, as_count: bool = False) -> CandidateProfile:
    common = g.common_neighbors(i, v)
    return CandidateProfile(display_name(v), {"common_neighbors": len(common) if as_count else names_of(common)})


def attribute_profile(attrs, v: int) -> CandidateProfile:
    return CandidateProfile(display_name(v), attrs.row(v))


def realworld_profile(g, attrs, i: int, v: int) -> CandidateProfile:
    feats = dict(attrs.row(v))
    feats["degree"] = g.degree(v)
    feats["common_neighbors"] = g.common_neighbor_count(i, v)
    return CandidateProfile(display_name(v), feats)


# --------------------------------------------------------------------------
# response parsing

_FENCE = re.compile(r"```(?:json|JSON)?\s*\n?(.*?)```", re.DOTALL)


def _first_json(text: str, kind: type):
    decoder = json.JSONDecoder()
    chunks = [m.group(1) for m in _FENCE.finditer(text)] + [text]
    opener = "[" if kind is list else "{"
    for chunk in chunks:
        pos = chunk.find(opener)
        while pos != -1:
            try:
                obj, _ = decoder.raw_decode(chunk, pos)
            except json.JSONDecodeError:
                obj = None
            if isinstance(obj, kind):
                return obj
            pos = chunk.find(opener, pos + 1)
    return None


def normalize_name(raw, names: Sequence[str]) -> str | None:
    """Map ``"Person 7"``, ``7`` or ``"7"`` onto a candidate name, else None."""
    lookup = set(names)
    if isinstance(raw, bool) or raw is None:
        return None
    if isinstance(raw, (int, float)) and float(raw).is_integer():
        cand = display_name(int(raw))
        return cand if cand in lookup else (str(int(raw)) if str(int(raw)) in lookup else None)
    if isinstance(raw, str):
        s = raw.strip()
        if s in lookup:
            return s
        m = re.fullmatch(r"(?:person\s*)?(\d+)", s, flags=re.IGNORECASE)
        if m:
            cand = display_name(int(m.group(1)))
            if cand in lookup:
                return cand
            if m.group(1) in lookup:
                return m.group(1)
    return None


@dataclass(frozen=True)
class PolicyDecision:
    selections: tuple[tuple[str, str], ...]  # (display name, reason), ranked
    indices: tuple[int, ...]  # positions in the presented candidate list
    raw_response: str | None = None
    fingerprint: str = ""
    warnings: int = 0

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.selections]


def decision_from_indices(indices: Sequence[int], names: Sequence[str], fingerprint: str,
                          raw_response: str | None = None, reasons: Sequence[str] | None = None) -> PolicyDecision:
    idx = tuple(int(i) for i in indices)
    if len(set(idx)) != len(idx):
        raise ResponseValidationError("duplicate selections")
    reasons = list(reasons) if reasons is not None else [""] * len(idx)
    return PolicyDecision(tuple((names[i], r) for i, r in zip(idx, reasons)), idx, raw_response, fingerprint)


def parse_response(text: str, bundle: PromptBundle, fingerprint: str = "") -> PolicyDecision:
    """Extract the ranked selections from a model reply.

    Unknown and repeated names are dropped (counted in ``warnings``); the
    result is cut to the first ``delta`` valid entries.
    """
    arr = _first_json(text or "", list)
    if arr is None:
        raise ResponseParseError("no JSON array found in response")
    names = bundle.names
    pos = {n: i for i, n in enumerate(names)}
    picked: list[tuple[str, str]] = []
    seen: set[str] = set()
    warnings = 0
    for entry in arr:
        if isinstance(entry, dict):
            raw_name, reason = entry.get("name"), entry.get("reason", "")
        else:
            raw_name, reason = entry, ""
        name = normalize_name(raw_name, names)
        if name is None or name in seen:
            warnings += 1
            continue
        seen.add(name)
        picked.append((name, "" if reason is None else str(reason)))
    if not picked:
        raise ResponseValidationError("response names no valid candidate")
    picked = picked[: bundle.delta]
    return PolicyDecision(tuple(picked), tuple(pos[n] for n, _ in picked), text, fingerprint, warnings)


# --------------------------------------------------------------------------
# survey prompt

SURVEY_PROFILE_TEXT = {
    "social": "You are an undergraduate student at a university. You are looking for friends to connect with on a social network.",
    "company": "You are an employee at a company. You are looking for colleagues to connect with on a company network.",
}
RANK_KEYS = {"degree": "ranking_degree", "similarity": "ranking_similarity", "common_friends": "ranking_common_friends"}

SURVEY_TEMPLATE = """# Task
Your task is to select a set of people to be friends with.

# Profile
{profile_text}

# Candidate Profiles
The candidate profiles to be friends with are given below after chevrons:

<PROFILES>
{profiles}
</PROFILES>

# Output
The output should be as a JSON object with the following structure

{{
    "name" : name of the person you selected (integer format),
    "reason" : reason for selecting the person,
    "ranking_degree" : ranking of how much you based your decision on the degree of the person (1 = most important, 2 = average important, 3 = least important),
    "ranking_similarity" : ranking of how much you based your decision on the similarity of the person (1 = most important, 2 = average important, 3 = least important),
    "ranking_common_friends" : ranking of how much you based your decision on the number of common friends with the person (1 = most important, 2 = average important, 3 = least important)
}}

# Notes
* The output must be a single JSON object ranked in the order of preference.
* You can make at most 1 selection.
* Your output must be contained within the json markdown cue.
* Rankings must be mutually exclusive, i.e. you cannot have the same ranking for two different attributes.
"""


def survey_candidate_objects(context: str, candidates: Sequence[Mapping[str, int]]) -> list[dict]:
    """Candidates are named 1, 2, 3 in presentation order."""
    out = []
    for k, c in enumerate(candidates, start=1):
        obj: dict[str, Any] = {"name": k, "degree": int(c["degree"]), "common_friends": int(c["common"])}
        if context == "company":
            obj["role"] = "manager" if int(c["similarity"]) else "co-worker"
        else:
            obj["similarity"] = int(c["similarity"])
        out.append(obj)
    return out


def render_survey_prompt(context: str, candidates: Sequence[Mapping[str, int]]) -> str:
    if context not in SURVEY_PROFILE_TEXT:
        raise PromptError(f"unknown survey context {context!r}")
    if not candidates:
        raise PromptError("candidate list is empty")
    return SURVEY_TEMPLATE.format(profile_text=SURVEY_PROFILE_TEXT[context],
                                  profiles=_dump(survey_candidate_objects(context, candidates)))


@dataclass(frozen=True)
class SurveyAnswer:
    choice: int  # 0-based position in the presented candidates
    reason: str
    rankings: dict[str, int]
    raw_response: str


def parse_survey_response(text: str, n_candidates: int = 3) -> SurveyAnswer:
    obj = _first_json(text or "", dict)
    if obj is None:
        raise ResponseParseError("no JSON object found in survey response")
    raw = obj.get("name")
    try:
        choice = int(str(raw).strip().split()[-1]) - 1
    except (ValueError, IndexError):
        raise ResponseValidationError(f"unparseable survey choice {raw!r}") from None
    if not 0 <= choice < n_candidates:
        raise ResponseValidationError(f"survey choice {raw!r} outside 1..{n_candidates}")
    rankings = {}
    for crit, key in RANK_KEYS.items():
        try:
            rankings[crit] = int(obj[key])
        except (KeyError, TypeError, ValueError):
            raise ResponseValidationError(f"missing or invalid {key}") from None
    if sorted(rankings.values()) != [1, 2, 3]:
        raise ResponseValidationError(f"rankings are not mutually exclusive: {rankings}")
    return SurveyAnswer(choice, str(obj.get("reason", "")), rankings, text)
